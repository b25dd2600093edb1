#include <cmath>
#include <random>

#include "doctest.h"
#include "smfkit/filters.hpp"
#include "smfkit/harness.hpp"
#include "smfkit/linalg.hpp"

using namespace smfkit;

namespace {

Vec random_vec(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Vec v(n);
    for (double& x : v) x = gauss(rng);
    return v;
}

Matrix random_mat(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) m(i, j) = gauss(rng);
    }
    return m;
}

// inner support never exceeds outer support over the sampled directions
bool supports_dominated(const CZono& inner, const CZono& outer, const DirectionGrid& grid,
                        double tol = 1e-7) {
    for (const Vec& d : grid.directions) {
        if (support(inner, d) > support(outer, d) + tol) return false;
    }
    return true;
}

bool hulls_match(const CZono& x, const CZono& y, double tol = 1e-7) {
    const Box hx = interval_hull(x);
    const Box hy = interval_hull(y);
    for (std::size_t i = 0; i < hx.center.size(); ++i) {
        if (std::fabs(hx.center[i] - hy.center[i]) > tol) return false;
        if (std::fabs(hx.half_widths[i] - hy.half_widths[i]) > tol) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("prediction and update preserve set inclusion") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const DirectionGrid grid = DirectionGrid::make(2, 16);
    int checked = 0;
    for (int trial = 0; trial < 260; ++trial) {
        const Vec c = random_vec(2, rng, 2.0);
        Vec h{u(rng) + 0.5, u(rng) + 0.5};
        const CZono outer = CZono::from_box(c, h);
        // inner box: shrink and shift while staying inside
        const double s = 0.3 + 0.5 * u(rng);
        Vec hi{h[0] * s, h[1] * s};
        Vec ci{c[0] + (h[0] - hi[0]) * (2.0 * u(rng) - 1.0),
               c[1] + (h[1] - hi[1]) * (2.0 * u(rng) - 1.0)};
        const CZono inner = CZono::from_box(ci, hi);

        const Matrix a = random_mat(2, 2, rng);
        const Matrix b = random_mat(2, 1, rng);
        const CZono w = CZono::interval(-u(rng) - 0.1, u(rng) + 0.1);
        const CZono pi = predict(inner, a, b, w);
        const CZono po = predict(outer, a, b, w);
        REQUIRE(supports_dominated(pi, po, grid));

        const Matrix cm = random_mat(1, 2, rng);
        const CZono v = CZono::interval(-1.0, 1.0);
        const Vec y{dot(cm.row(0), pi.c) + 2.0 * u(rng) - 1.0};  // keeps inner nonempty
        const CZono ui = update(pi, cm, y, v);
        const CZono uo = update(po, cm, y, v);
        if (is_empty(ui)) continue;
        REQUIRE_FALSE(is_empty(uo));
        REQUIRE(supports_dominated(ui, uo, grid));
        ++checked;
    }
    CHECK(checked >= 200);
}

TEST_CASE("update equals intersecting with the measurement set") {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const CZono z = CZono::from_box(random_vec(2, rng, 2.0), {u(rng) + 0.3, u(rng) + 0.3});
        const Matrix cm = random_mat(1, 2, rng);
        const CZono v = CZono::interval(-0.5 - u(rng), 0.5 + u(rng));
        const Vec y{dot(cm.row(0), z.c) + 2.0 * (u(rng) - 0.5)};

        const CZono via_update = update(z, cm, y, v);
        const CZono via_meas = intersect(z, measurement_set(cm, y, v));
        const bool e1 = is_empty(via_update);
        const bool e2 = is_empty(via_meas);
        REQUIRE(e1 == e2);
        if (e1) continue;
        REQUIRE(hulls_match(via_update, via_meas));
        ++checked;
    }
    CHECK(checked >= 200);
}

TEST_CASE("measurement set membership matches the output equation") {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 220; ++trial) {
        const std::size_t n = 2 + trial % 2;  // 2 or 3 states
        const std::size_t m = 1 + trial % 2;  // fewer outputs than states
        const Matrix cm = random_mat(m, n, rng);
        const Vec vh(m, 0.5);
        const CZono v = CZono::from_box(Vec(m, 0.0), vh);
        const Vec y = random_vec(m, rng, 2.0);
        const CZono ms = measurement_set(cm, y, v);

        // construct a member: x = pinv(c) (y - v0) + kernel * t
        Vec v0(m);
        for (double& x : v0) x = 0.5 * (2.0 * u(rng) - 1.0);
        const Matrix kern = kernel_basis(cm);
        Vec x = pinv(cm) * (y - v0);
        const Vec t = random_vec(kern.cols(), rng, 5.0);
        x = x + kern * t;
        REQUIRE(contains_point(ms, x));

        // and a non-member: push the output residual outside the noise range
        Vec v_bad = v0;
        v_bad[0] = 2.0;
        const Vec x_bad = pinv(cm) * (y - v_bad) + kern * t;
        REQUIRE_FALSE(contains_point(ms, x_bad));
        ++checked;
    }
    CHECK(checked >= 200);
}

TEST_CASE("classical estimates stay inside the reachable range") {
    const DirectionGrid grid = DirectionGrid::make(2, 720);
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const LinearSystem sys = random_observable_system(seed, 2, 1, 1);
        const Trajectory traj = simulate(sys, 5, seed + 1000);
        ClassicalSmfState s = classical_init(sys.x0_true);
        for (std::size_t k = 0; k <= 5; ++k) {
            s = classical_step(s, traj.y[k], sys);
            REQUIRE_FALSE(is_empty(s.posterior));
            const CZono reach = state_evolution_set(sys, sys.x0_true, k);
            REQUIRE(supports_dominated(s.posterior, reach, grid));
            ++checked;
        }
    }
    CHECK(checked >= 200);
}

TEST_CASE("filter image equals the explicit update-predict composition") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 240; ++trial) {
        const std::uint64_t seed = 500 + static_cast<std::uint64_t>(trial);
        const LinearSystem sys = random_observable_system(seed, 2, 1, 1);
        const std::size_t len = 2 + trial % 3;
        const Trajectory traj = simulate(sys, len - 1, seed + 9000);
        const CZono start = CZono::from_box(random_vec(2, rng, 2.0), {12.0, 12.0});

        CZono manual = update(start, sys.c, traj.y[0], sys.v);
        for (std::size_t l = 1; l < len; ++l) {
            manual = update(predict(manual, sys.a, sys.b, sys.w), sys.c, traj.y[l], sys.v);
        }
        const CZono folded = filter_image(start, sys.a, sys.b, sys.c, sys.w, sys.v,
                                          std::vector<Vec>(traj.y.begin(), traj.y.end()));
        const bool e1 = is_empty(manual);
        REQUIRE(e1 == is_empty(folded));
        if (e1) continue;
        REQUIRE(hulls_match(manual, folded));
        ++checked;
    }
    CHECK(checked >= 200);
}

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "smfkit/linalg.hpp"
#include "smfkit/lp.hpp"

using namespace smfkit;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("box-only minimization") {
    LpProblem p;
    p.objective = {-1.0};
    p.eq_a = Matrix(0, 1);
    p.eq_b = {};
    p.lower = {0.0};
    p.upper = {2.0};
    const LpOutcome out = solve(p);
    REQUIRE(out.status == LpStatus::optimal);
    CHECK(out.optimum == doctest::Approx(-2.0));
    CHECK(out.witness[0] == doctest::Approx(2.0));
}

TEST_CASE("equality constrained") {
    LpProblem p;
    p.objective = {1.0, 0.0};
    p.eq_a = Matrix{{1.0, 1.0}};
    p.eq_b = {1.0};
    p.lower = {0.0, 0.0};
    p.upper = {1.0, 1.0};
    const LpOutcome out = solve(p);
    REQUIRE(out.status == LpStatus::optimal);
    CHECK(out.optimum == doctest::Approx(0.0));
}

TEST_CASE("free variable tied to a bounded one") {
    // x free, y in [-1,1], x - y = 5: min x = 4
    LpProblem p;
    p.objective = {1.0, 0.0};
    p.eq_a = Matrix{{1.0, -1.0}};
    p.eq_b = {5.0};
    p.lower = {-kInf, -1.0};
    p.upper = {kInf, 1.0};
    const LpOutcome out = solve(p);
    REQUIRE(out.status == LpStatus::optimal);
    CHECK(out.optimum == doctest::Approx(4.0));
}

TEST_CASE("unbounded direction reported") {
    LpProblem p;
    p.objective = {-1.0};
    p.eq_a = Matrix(0, 1);
    p.eq_b = {};
    p.lower = {-kInf};
    p.upper = {kInf};
    CHECK(solve(p).status == LpStatus::unbounded);
}

TEST_CASE("infeasible systems") {
    SUBCASE("bound conflict with constraint") {
        LpProblem p;
        p.objective = {0.0};
        p.eq_a = Matrix{{1.0}};
        p.eq_b = {3.0};
        p.lower = {0.0};
        p.upper = {1.0};
        CHECK(solve(p).status == LpStatus::infeasible);
    }
    SUBCASE("measurement strip misses the prior box") {
        // xi1 + 0.5 xi2 = -2.5 has no solution in [-1,1]^2
        CHECK_FALSE(feasible(Matrix{{1.0, 0.5}}, {-2.5}, {-1.0, -1.0}, {1.0, 1.0}));
    }
}

TEST_CASE("support of a constrained segment") {
    // max 2 xi1 subject to 2 xi1 + xi2 = 1, xi in [-1,1]^2 -> 2
    LpProblem p;
    p.objective = {-2.0, 0.0};
    p.eq_a = Matrix{{2.0, 1.0}};
    p.eq_b = {1.0};
    p.lower = {-1.0, -1.0};
    p.upper = {1.0, 1.0};
    const LpOutcome out = solve(p);
    REQUIRE(out.status == LpStatus::optimal);
    CHECK(-out.optimum == doctest::Approx(2.0));
}

TEST_CASE("warm-started objectives match fresh solves") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 4;
        Matrix a(2, n);
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < n; ++j) a(i, j) = gauss(rng);
        }
        Vec feas(n);
        for (double& v : feas) v = 0.5 * gauss(rng);
        const Vec b = a * feas;  // guarantees feasibility
        const Vec lower(n, -2.0), upper(n, 2.0);

        SimplexSolver shared(a, b, lower, upper);
        for (int obj = 0; obj < 6; ++obj) {
            Vec c(n);
            for (double& v : c) v = gauss(rng);
            const LpOutcome warm = shared.optimize(c);
            const LpOutcome fresh = solve({c, a, b, lower, upper});
            REQUIRE(warm.status == LpStatus::optimal);
            REQUIRE(fresh.status == LpStatus::optimal);
            CHECK(warm.optimum == doctest::Approx(fresh.optimum).epsilon(1e-7));
        }
    }
}

namespace {

// exhaustive vertex enumeration for equality + finite-box LPs (oracle)
struct OracleResult {
    bool feasible = false;
    double optimum = 0.0;
};

OracleResult brute_force(const LpProblem& p) {
    const std::size_t n = p.objective.size();
    const std::size_t m = p.eq_a.rows();
    OracleResult best;
    // choose which variables sit at a bound (n - m of them), which bound, and
    // solve the square system for the rest
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(m), true);  // free set of size m
    std::sort(pick.begin(), pick.end());
    do {
        std::vector<std::size_t> free_vars, fixed_vars;
        for (std::size_t i = 0; i < n; ++i) (pick[i] ? free_vars : fixed_vars).push_back(i);
        const std::size_t nfixed = fixed_vars.size();
        for (std::size_t mask = 0; mask < (1u << nfixed); ++mask) {
            Vec x(n, 0.0);
            for (std::size_t t = 0; t < nfixed; ++t) {
                const std::size_t j = fixed_vars[t];
                x[j] = (mask >> t) & 1 ? p.upper[j] : p.lower[j];
            }
            if (m > 0) {
                Matrix sub(m, m);
                Vec rhs = p.eq_b;
                for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t t = 0; t < m; ++t) sub(i, t) = p.eq_a(i, free_vars[t]);
                    for (std::size_t j : fixed_vars) rhs[i] -= p.eq_a(i, j) * x[j];
                }
                try {
                    const Vec sol = solve(sub, rhs);
                    for (std::size_t t = 0; t < m; ++t) x[free_vars[t]] = sol[t];
                } catch (const numerical_error&) {
                    continue;
                }
            }
            bool ok = true;
            for (std::size_t j = 0; j < n && ok; ++j) {
                if (x[j] < p.lower[j] - 1e-7 || x[j] > p.upper[j] + 1e-7) ok = false;
            }
            if (!ok) continue;
            const double val = dot(p.objective, x);
            if (!best.feasible || val < best.optimum) {
                best.feasible = true;
                best.optimum = val;
            }
        }
    } while (std::next_permutation(pick.begin(), pick.end()));
    return best;
}

}  // namespace

TEST_CASE("randomized agreement with vertex enumeration") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> nv(1, 3);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        LpProblem p;
        const std::size_t n = nv(rng);
        std::uniform_int_distribution<std::size_t> nc(0, n - 1);
        const std::size_t m = nc(rng);
        p.objective.resize(n);
        for (double& v : p.objective) v = gauss(rng);
        p.eq_a = Matrix(m, n);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) p.eq_a(i, j) = gauss(rng);
        }
        p.eq_b.resize(m);
        for (double& v : p.eq_b) v = gauss(rng);
        p.lower.resize(n);
        p.upper.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double a = gauss(rng), b = gauss(rng);
            p.lower[j] = std::min(a, b);
            p.upper[j] = std::max(a, b);
        }
        const OracleResult expect = brute_force(p);
        const LpOutcome got = solve(p);
        if (expect.feasible) {
            REQUIRE(got.status == LpStatus::optimal);
            CHECK(got.optimum == doctest::Approx(expect.optimum).epsilon(1e-6));
            ++checked;
        } else {
            CHECK(got.status == LpStatus::infeasible);
        }
    }
    CHECK(checked >= 200);
}

TEST_CASE("pivot cap raises a numerical error") {
    LpSettings tight;
    tight.pivot_cap = 0;
    SimplexSolver solver(Matrix{{1.0, 1.0}}, {1.0}, {0.0, 0.0}, {1.0, 1.0}, tight);
    CHECK_THROWS_AS(solver.prepare(), numerical_error);
}

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "smfkit/czono.hpp"

using namespace smfkit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_hull(const CZono& z, const Vec& lo, const Vec& hi, double tol = 1e-9) {
    const Box hull = interval_hull(z);
    REQUIRE(hull.center.size() == lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
        CHECK(hull.center[i] - hull.half_widths[i] == doctest::Approx(lo[i]).epsilon(tol));
        CHECK(hull.center[i] + hull.half_widths[i] == doctest::Approx(hi[i]).epsilon(tol));
    }
}

}  // namespace

TEST_CASE("box constructors round-trip through the hull") {
    check_hull(CZono::from_box({1.0, 2.0}, {3.0, 0.5}), {-2.0, 1.5}, {4.0, 2.5});
    check_hull(CZono::interval(-1.0, 3.0), {-1.0}, {3.0});
    CHECK_THROWS_AS(CZono::interval(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(CZono::from_box({0.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("singleton") {
    const CZono z = CZono::singleton({1.0, -2.0});
    CHECK(contains_point(z, {1.0, -2.0}));
    CHECK_FALSE(contains_point(z, {1.0, -1.0}));
    const Box hull = interval_hull(z);
    CHECK(hull.diameter() == doctest::Approx(0.0));
    check_hull(z, {1.0, -2.0}, {1.0, -2.0});
}

TEST_CASE("whole space is unbounded in every direction") {
    const CZono z = CZono::whole_space(2);
    CHECK(support(z, {1.0, 0.0}) == kInf);
    CHECK(support(z, {-0.3, 0.7}) == kInf);
    const Box hull = interval_hull(z);
    CHECK_FALSE(hull.bounded());
    CHECK(hull.half_widths[0] == kInf);
    CHECK(hull.half_widths[1] == kInf);
    CHECK(contains_point(z, {1e6, -1e6}));
}

TEST_CASE("validate rejects malformed sets") {
    CZono z = CZono::from_box({0.0, 0.0}, {1.0, 1.0});
    z.h[0] = -1.0;
    CHECK_THROWS_AS(z.validate(), std::invalid_argument);
    z = CZono::from_box({0.0, 0.0}, {1.0, 1.0});
    z.a = Matrix(1, 3);  // wrong generator count
    CHECK_THROWS_AS(z.validate(), std::invalid_argument);
}

TEST_CASE("linear image") {
    const CZono box = CZono::from_box({0.0, 0.0}, {1.0, 1.0});
    SUBCASE("rotation by 90 degrees keeps the unit box hull") {
        check_hull(linear_image(Matrix{{0.0, -1.0}, {1.0, 0.0}}, box), {-1.0, -1.0}, {1.0, 1.0});
    }
    SUBCASE("axis scaling") {
        check_hull(linear_image(Matrix{{2.0, 0.0}, {0.0, 3.0}}, box), {-2.0, -3.0}, {2.0, 3.0});
    }
    SUBCASE("projection to a row") {
        const CZono line = linear_image(Matrix{{1.0, 1.0}}, box);
        CHECK(line.dim() == 1);
        check_hull(line, {-2.0}, {2.0});
    }
    CHECK_THROWS_AS(linear_image(Matrix{{1.0}}, box), std::invalid_argument);
}

TEST_CASE("translate and minkowski sum") {
    const CZono a = CZono::from_box({0.0, 0.0}, {1.0, 1.0});
    const CZono b = CZono::from_box({0.0, 0.0}, {2.0, 2.0});
    check_hull(translate(a, {5.0, -1.0}), {4.0, -2.0}, {6.0, 0.0});
    const CZono s = minkowski_sum(a, b);
    check_hull(s, {-3.0, -3.0}, {3.0, 3.0});
    CHECK(support(s, {1.0, 0.0}) == doctest::Approx(3.0));
    CHECK(s.num_generators() == 4);
    CHECK_THROWS_AS(minkowski_sum(a, CZono::interval(0.0, 1.0)), std::invalid_argument);
}

TEST_CASE("cartesian product stacks coordinates") {
    const CZono z = cartesian_product(CZono::interval(-1.0, 1.0), CZono::interval(0.0, 4.0));
    CHECK(z.dim() == 2);
    check_hull(z, {-1.0, 0.0}, {1.0, 4.0});
}

TEST_CASE("intersection") {
    SUBCASE("overlapping boxes clip each other") {
        const CZono x = CZono::from_box({2.0, 2.0}, {2.0, 2.0});  // [0,4]^2
        const CZono y = CZono::from_box({5.0, 2.0}, {2.0, 2.0});  // [3,7] x [0,4]
        const CZono z = intersect(x, y);
        CHECK_FALSE(is_empty(z));
        check_hull(z, {3.0, 0.0}, {4.0, 4.0});
    }
    SUBCASE("disjoint boxes intersect to the empty set") {
        const CZono x = CZono::from_box({0.5, 0.5}, {0.5, 0.5});
        const CZono y = CZono::from_box({2.5, 2.5}, {0.5, 0.5});
        CHECK(is_empty(intersect(x, y)));
    }
    CHECK_THROWS_AS(intersect(CZono::interval(0.0, 1.0), CZono::whole_space(2)),
                    std::invalid_argument);
}

TEST_CASE("projection keeps a coordinate range") {
    const CZono z = CZono::from_box({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
    check_hull(project(z, 1, 2), {1.0, 2.0}, {3.0, 4.0});
    check_hull(project(z, 0, 1), {0.0}, {2.0});
    CHECK_THROWS_AS(project(z, 2, 2), std::invalid_argument);
}

TEST_CASE("prediction through a double integrator") {
    // x' = [1 1; 0 1] x + [0.5; 1] w, x in [2,3]^2, w in [-1,1]
    const CZono x = CZono::from_box({2.5, 2.5}, {0.5, 0.5});
    const CZono w = CZono::interval(-1.0, 1.0);
    const CZono next = predict(x, Matrix{{1.0, 1.0}, {0.0, 1.0}}, Matrix{{0.5}, {1.0}}, w);
    check_hull(next, {3.5, 1.0}, {6.5, 4.0});
    CHECK_THROWS_AS(predict(x, Matrix{{1.0}}, Matrix{{1.0}}, w), std::invalid_argument);
}

TEST_CASE("measurement update") {
    const Matrix c{{1.0, 0.0}};
    const CZono v = CZono::interval(-1.0, 1.0);
    SUBCASE("strip clips the prior box") {
        const CZono prior = CZono::from_box({0.0, 0.0}, {2.0, 2.0});
        const CZono post = update(prior, c, {1.0}, v);
        CHECK_FALSE(is_empty(post));
        check_hull(post, {0.0, -2.0}, {2.0, 2.0});
        CHECK(contains_point(post, {1.0, 0.0}));
        CHECK_FALSE(contains_point(post, {-1.0, 0.0}));
    }
    SUBCASE("measurement far from the prior empties the posterior") {
        const CZono prior = CZono::from_box({0.0, 0.0}, {1.0, 1.0});
        CHECK(is_empty(update(prior, c, {3.0}, v)));
    }
    SUBCASE("zero measurement noise pins the measured coordinate") {
        const CZono prior = CZono::from_box({0.0, 0.0}, {2.0, 2.0});
        const CZono post = update(prior, c, {0.5}, CZono::singleton({0.0}));
        check_hull(post, {0.5, -2.0}, {0.5, 2.0});
    }
    CHECK_THROWS_AS(update(CZono::interval(0.0, 1.0), c, {1.0}, v), std::invalid_argument);
}

TEST_CASE("measurement set is a strip with an unbounded kernel direction") {
    const CZono m = measurement_set(Matrix{{1.0, 0.0}}, {1.0}, CZono::interval(-1.0, 1.0));
    CHECK(support(m, {1.0, 0.0}) == doctest::Approx(2.0));
    CHECK(-support(m, {-1.0, 0.0}) == doctest::Approx(0.0));
    CHECK(support(m, {0.0, 1.0}) == kInf);
    const Box hull = interval_hull(m);
    CHECK(hull.half_widths[0] == doctest::Approx(1.0));
    CHECK(hull.center[0] == doctest::Approx(1.0));
    CHECK(hull.half_widths[1] == kInf);
    CHECK(contains_point(m, {0.5, 1234.0}));
    CHECK_FALSE(contains_point(m, {2.5, 0.0}));
}

TEST_CASE("filter image matches explicit update/predict composition") {
    const Matrix a{{1.0, 1.0}, {0.0, 1.0}};
    const Matrix b{{0.5}, {1.0}};
    const Matrix c{{1.0, 0.0}};
    const CZono w = CZono::interval(-1.0, 1.0);
    const CZono v = CZono::interval(-1.0, 1.0);
    const CZono start = CZono::from_box({2.5, 2.5}, {0.5, 0.5});
    const std::vector<Vec> window = {{2.3}, {5.1}, {7.6}};

    CZono manual = update(start, c, window[0], v);
    CZono manual_prior;
    for (std::size_t l = 1; l < window.size(); ++l) {
        manual_prior = predict(manual, a, b, w);
        manual = update(manual_prior, c, window[l], v);
    }
    CZono got_prior;
    const CZono got = filter_image(start, a, b, c, w, v, window, &got_prior);

    const Box hm = interval_hull(manual), hg = interval_hull(got);
    const Box pm = interval_hull(manual_prior), pg = interval_hull(got_prior);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(hg.center[i] == doctest::Approx(hm.center[i]));
        CHECK(hg.half_widths[i] == doctest::Approx(hm.half_widths[i]));
        CHECK(pg.center[i] == doctest::Approx(pm.center[i]));
        CHECK(pg.half_widths[i] == doctest::Approx(pm.half_widths[i]));
    }
    CHECK_THROWS_AS(filter_image(start, a, b, c, w, v, std::vector<Vec>{}),
                    std::invalid_argument);
}

TEST_CASE("support of a plain box has a closed form") {
    const CZono z = CZono::from_box({1.0, 2.0}, {1.0, 3.0});
    CHECK(support(z, {1.0, 1.0}) == doctest::Approx(7.0));
    CHECK(support(z, {-1.0, 0.0}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(support(z, {1.0}), std::invalid_argument);
}

TEST_CASE("queries on the empty set throw") {
    const CZono empty = update(CZono::from_box({0.0, 0.0}, {1.0, 1.0}), Matrix{{1.0, 0.0}},
                               {5.0}, CZono::interval(-1.0, 1.0));
    REQUIRE(is_empty(empty));
    CHECK_THROWS_AS(support(empty, {1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(interval_hull(empty), std::invalid_argument);
}

TEST_CASE("box sampling") {
    const CZono z = CZono::from_box({1.0, -1.0}, {2.0, 0.0});
    std::mt19937_64 rng1(5), rng2(5);
    for (int i = 0; i < 50; ++i) {
        const Vec s = sample_box(z, rng1);
        CHECK(s[0] >= -1.0);
        CHECK(s[0] <= 3.0);
        CHECK(s[1] == -1.0);  // degenerate coordinate stays at the center
        const Vec s2 = sample_box(z, rng2);
        CHECK(s[0] == s2[0]);
    }
    CHECK_THROWS_AS(sample_box(CZono::whole_space(1), rng1), std::invalid_argument);
    const CZono constrained = intersect(z, z);
    CHECK_THROWS_AS(sample_box(constrained, rng1), std::invalid_argument);
}

TEST_CASE("json round-trip keeps infinite bounds") {
    const CZono m = measurement_set(Matrix{{1.0, 0.0}}, {1.0}, CZono::interval(-1.0, 1.0));
    const nlohmann::json j = to_json(m);
    CHECK(j.at("h")[0] == "inf");
    const CZono back = czono_from_json(j);
    REQUIRE(back.dim() == m.dim());
    REQUIRE(back.num_generators() == m.num_generators());
    for (std::size_t i = 0; i < m.g.rows(); ++i) {
        for (std::size_t jj = 0; jj < m.g.cols(); ++jj) CHECK(back.g(i, jj) == m.g(i, jj));
    }
    for (std::size_t i = 0; i < m.h.size(); ++i) CHECK(back.h[i] == m.h[i]);
    for (std::size_t i = 0; i < m.c.size(); ++i) CHECK(back.c[i] == m.c[i]);

    nlohmann::json bad = j;
    bad["h"][0] = "huge";
    CHECK_THROWS_AS(czono_from_json(bad), std::invalid_argument);
}

TEST_CASE("matrix json round-trip") {
    const Matrix m{{1.0, 2.5}, {-3.0, 0.0}};
    const Matrix back = matrix_from_json(to_json(m));
    REQUIRE(back.rows() == 2);
    REQUIRE(back.cols() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) CHECK(back(i, j) == m(i, j));
    }
    CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse("[[1,2],[3]]")),
                    std::invalid_argument);
}

#ifndef SMFKIT_CZONO_HPP
#define SMFKIT_CZONO_HPP

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "json.hpp"
#include "smfkit/lp.hpp"
#include "smfkit/matrix.hpp"

namespace smfkit {

// Axis-aligned box; half_widths entries may be +inf.
struct Box {
    Vec center;
    Vec half_widths;

    bool bounded() const;
    double max_half_width() const;
    // Euclidean length of the diagonal (inf when unbounded)
    double diameter() const;
    // largest edge length (inf when unbounded)
    double diameter_inf() const;
};

// Constrained zonotope with explicit generator bounds:
//   { g xi + c : a xi = b, |xi_j| <= h_j }.
// Entries of h may be +inf, which makes the corresponding generator direction
// unbounded (used for e.g. kernel directions of a measurement set).
struct ConstrainedZonotope {
    Matrix g;
    Vec c;
    Matrix a;
    Vec b;
    Vec h;

    std::size_t dim() const { return c.size(); }
    std::size_t num_generators() const { return g.cols(); }
    std::size_t num_constraints() const { return a.rows(); }

    void validate() const;

    static ConstrainedZonotope from_box(const Box& box);
    static ConstrainedZonotope from_box(const Vec& center, const Vec& half_widths);
    static ConstrainedZonotope interval(double lo, double hi);
    static ConstrainedZonotope singleton(const Vec& point);
    // all of R^n (identity generators with infinite bounds)
    static ConstrainedZonotope whole_space(std::size_t n);
};

using CZono = ConstrainedZonotope;

// set algebra
CZono linear_image(const Matrix& m, const CZono& z);
CZono translate(const CZono& z, const Vec& t);
CZono minkowski_sum(const CZono& x, const CZono& y);
CZono cartesian_product(const CZono& x, const CZono& y);
CZono intersect(const CZono& x, const CZono& y);
// keep coordinates [first, first+count)
CZono project(const CZono& z, std::size_t first, std::size_t count);

// one prediction step: a_mat * z + b_mat * w
CZono predict(const CZono& z, const Matrix& a_mat, const Matrix& b_mat, const CZono& w);
// measurement intersection: z cap { x : c_mat x = y - v, v in noise set }
CZono update(const CZono& z, const Matrix& c_mat, const Vec& y, const CZono& v);
// ker(c_mat) + pinv(c_mat) ({y} + (-noise set))
CZono measurement_set(const Matrix& c_mat, const Vec& y, const CZono& v);

// fold of update/predict/update... over a measurement window y_i..y_k starting
// from the prior z_start at the window's first time step.  If final_prior is
// given, it receives the one-step prediction that precedes the last update
// (z_start itself for a single-measurement window).
CZono filter_image(const CZono& z_start, const Matrix& a_mat, const Matrix& b_mat,
                   const Matrix& c_mat, const CZono& w, const CZono& v,
                   std::span<const Vec> window, CZono* final_prior = nullptr);

// LP-backed queries
bool is_empty(const CZono& z, LpSettings settings = {});
bool contains_point(const CZono& z, const Vec& x, LpSettings settings = {});
// sup over the set of d . x; +inf when unbounded in that direction; throws
// std::invalid_argument on an empty set
double support(const CZono& z, const Vec& d, LpSettings settings = {});
Box interval_hull(const CZono& z, LpSettings settings = {});

// uniform sample of the generator coefficients; requires a constraint-free
// representation with finite bounds (box-like noise sets)
Vec sample_box(const CZono& z, std::mt19937_64& rng);

// JSON round-trip: {"g": [[..]], "c": [..], "a": [[..]], "b": [..], "h": [..]}
// with "inf" accepted/emitted for infinite bound entries
nlohmann::json to_json(const CZono& z);
CZono czono_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace smfkit

#endif

#include "smfkit/czono.hpp"

#include <cmath>
#include <limits>

#include "smfkit/linalg.hpp"

namespace smfkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool Box::bounded() const {
    for (double h : half_widths) {
        if (!std::isfinite(h)) return false;
    }
    return true;
}

double Box::max_half_width() const {
    double m = 0.0;
    for (double h : half_widths) m = std::max(m, h);
    return m;
}

double Box::diameter() const {
    if (!bounded()) return kInf;
    return 2.0 * norm_two(half_widths);
}

double Box::diameter_inf() const { return 2.0 * max_half_width(); }

void ConstrainedZonotope::validate() const {
    const std::size_t n = dim();
    const std::size_t ng = num_generators();
    if (g.rows() != n || h.size() != ng || a.cols() != ng || b.size() != a.rows()) {
        throw std::invalid_argument("ConstrainedZonotope: inconsistent dimensions");
    }
    for (double hv : h) {
        if (std::isnan(hv) || hv < 0.0) {
            throw std::invalid_argument("ConstrainedZonotope: generator bounds must be >= 0");
        }
    }
    if (!g.all_finite() || !a.all_finite()) {
        throw std::invalid_argument("ConstrainedZonotope: matrices must be finite");
    }
    for (double v : c) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("ConstrainedZonotope: center must be finite");
        }
    }
    for (double v : b) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("ConstrainedZonotope: constraint rhs must be finite");
        }
    }
}

ConstrainedZonotope ConstrainedZonotope::from_box(const Box& box) {
    return from_box(box.center, box.half_widths);
}

ConstrainedZonotope ConstrainedZonotope::from_box(const Vec& center, const Vec& half_widths) {
    if (center.size() != half_widths.size()) {
        throw std::invalid_argument("from_box: center/half-width size mismatch");
    }
    const std::size_t n = center.size();
    CZono z{Matrix::identity(n), center, Matrix(0, n), {}, half_widths};
    z.validate();
    return z;
}

ConstrainedZonotope ConstrainedZonotope::interval(double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("interval: lo > hi");
    return from_box({0.5 * (lo + hi)}, {0.5 * (hi - lo)});
}

ConstrainedZonotope ConstrainedZonotope::singleton(const Vec& point) {
    return {Matrix(point.size(), 0), point, Matrix(0, 0), {}, {}};
}

ConstrainedZonotope ConstrainedZonotope::whole_space(std::size_t n) {
    return from_box(Vec(n, 0.0), Vec(n, kInf));
}

CZono linear_image(const Matrix& m, const CZono& z) {
    if (m.cols() != z.dim()) {
        throw std::invalid_argument("linear_image: dimension mismatch");
    }
    return {m * z.g, m * z.c, z.a, z.b, z.h};
}

CZono translate(const CZono& z, const Vec& t) {
    return {z.g, z.c + t, z.a, z.b, z.h};
}

CZono minkowski_sum(const CZono& x, const CZono& y) {
    if (x.dim() != y.dim()) {
        throw std::invalid_argument("minkowski_sum: dimension mismatch");
    }
    return {hstack(x.g, y.g), x.c + y.c, blkdiag(x.a, y.a), concat(x.b, y.b), concat(x.h, y.h)};
}

CZono cartesian_product(const CZono& x, const CZono& y) {
    return {blkdiag(x.g, y.g), concat(x.c, y.c), blkdiag(x.a, y.a), concat(x.b, y.b),
            concat(x.h, y.h)};
}

CZono intersect(const CZono& x, const CZono& y) {
    if (x.dim() != y.dim()) {
        throw std::invalid_argument("intersect: dimension mismatch");
    }
    const Matrix g = hstack(x.g, Matrix(x.dim(), y.num_generators()));
    Matrix a = blkdiag(x.a, y.a);
    Matrix match = hstack(x.g, -1.0 * y.g);
    a = vstack(a, match);
    Vec b = concat(concat(x.b, y.b), y.c - x.c);
    return {g, x.c, a, b, concat(x.h, y.h)};
}

CZono project(const CZono& z, std::size_t first, std::size_t count) {
    if (first + count > z.dim()) {
        throw std::invalid_argument("project: coordinate range out of bounds");
    }
    Matrix g = z.g.block(first, 0, count, z.num_generators());
    Vec c(z.c.begin() + first, z.c.begin() + first + count);
    return {g, c, z.a, z.b, z.h};
}

CZono predict(const CZono& z, const Matrix& a_mat, const Matrix& b_mat, const CZono& w) {
    if (a_mat.cols() != z.dim() || b_mat.cols() != w.dim() || a_mat.rows() != b_mat.rows()) {
        throw std::invalid_argument("predict: dimension mismatch");
    }
    return {hstack(a_mat * z.g, b_mat * w.g),
            a_mat * z.c + b_mat * w.c,
            blkdiag(z.a, w.a),
            concat(z.b, w.b),
            concat(z.h, w.h)};
}

CZono update(const CZono& z, const Matrix& c_mat, const Vec& y, const CZono& v) {
    if (c_mat.cols() != z.dim() || c_mat.rows() != y.size() || v.dim() != y.size()) {
        throw std::invalid_argument("update: dimension mismatch");
    }
    const Matrix g = hstack(z.g, Matrix(z.dim(), v.num_generators()));
    Matrix a = blkdiag(z.a, v.a);
    a = vstack(a, hstack(c_mat * z.g, v.g));
    const Vec b = concat(concat(z.b, v.b), y - v.c - c_mat * z.c);
    return {g, z.c, a, b, concat(z.h, v.h)};
}

CZono measurement_set(const Matrix& c_mat, const Vec& y, const CZono& v) {
    if (c_mat.rows() != y.size() || v.dim() != y.size()) {
        throw std::invalid_argument("measurement_set: dimension mismatch");
    }
    const Matrix kern = kernel_basis(c_mat);
    const Matrix cp = pinv(c_mat);
    const Matrix g = hstack(kern, -1.0 * (cp * v.g));
    const Vec c = cp * (y - v.c);
    const Matrix a = hstack(Matrix(v.num_constraints(), kern.cols()), v.a);
    Vec h(kern.cols(), kInf);
    return {g, c, a, v.b, concat(h, v.h)};
}

CZono filter_image(const CZono& z_start, const Matrix& a_mat, const Matrix& b_mat,
                   const Matrix& c_mat, const CZono& w, const CZono& v,
                   std::span<const Vec> window, CZono* final_prior) {
    if (window.empty()) {
        throw std::invalid_argument("filter_image: empty measurement window");
    }
    CZono z = update(z_start, c_mat, window[0], v);
    if (final_prior && window.size() == 1) *final_prior = z_start;
    for (std::size_t l = 1; l < window.size(); ++l) {
        CZono prior = predict(z, a_mat, b_mat, w);
        if (final_prior && l + 1 == window.size()) *final_prior = prior;
        z = update(prior, c_mat, window[l], v);
    }
    return z;
}

namespace {

Vec lower_bounds(const CZono& z) {
    Vec lo(z.h.size());
    for (std::size_t j = 0; j < z.h.size(); ++j) lo[j] = -z.h[j];
    return lo;
}

}  // namespace

bool is_empty(const CZono& z, LpSettings settings) {
    z.validate();
    return !feasible(z.a, z.b, lower_bounds(z), z.h, settings);
}

bool contains_point(const CZono& z, const Vec& x, LpSettings settings) {
    z.validate();
    if (x.size() != z.dim()) {
        throw std::invalid_argument("contains_point: dimension mismatch");
    }
    const Matrix eq = vstack(z.a, z.g);
    const Vec rhs = concat(z.b, x - z.c);
    return feasible(eq, rhs, lower_bounds(z), z.h, settings);
}

double support(const CZono& z, const Vec& d, LpSettings settings) {
    z.validate();
    if (d.size() != z.dim()) {
        throw std::invalid_argument("support: dimension mismatch");
    }
    SimplexSolver solver(z.a, z.b, lower_bounds(z), z.h, settings);
    // maximize d.(g xi) == minimize -(g^T d).xi
    const Vec gd = z.g.transpose() * d;
    const LpOutcome out = solver.optimize(-1.0 * gd);
    if (out.status == LpStatus::infeasible) {
        throw std::invalid_argument("support: set is empty");
    }
    if (out.status == LpStatus::unbounded) return kInf;
    return dot(d, z.c) - out.optimum;
}

Box interval_hull(const CZono& z, LpSettings settings) {
    z.validate();
    SimplexSolver solver(z.a, z.b, lower_bounds(z), z.h, settings);
    if (!solver.prepare()) {
        throw std::invalid_argument("interval_hull: set is empty");
    }
    const std::size_t n = z.dim();
    Box box{Vec(n, 0.0), Vec(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        const Vec gi = z.g.row(i);
        const LpOutcome up = solver.optimize(-1.0 * gi);
        const LpOutcome lo = solver.optimize(gi);
        const double hi_val =
            up.status == LpStatus::unbounded ? kInf : z.c[i] - up.optimum;
        const double lo_val =
            lo.status == LpStatus::unbounded ? -kInf : z.c[i] + lo.optimum;
        if (std::isfinite(hi_val) && std::isfinite(lo_val)) {
            box.center[i] = 0.5 * (lo_val + hi_val);
            box.half_widths[i] = std::max(0.0, 0.5 * (hi_val - lo_val));
        } else {
            box.half_widths[i] = kInf;
            box.center[i] = std::isfinite(lo_val)   ? lo_val
                            : std::isfinite(hi_val) ? hi_val
                                                    : 0.0;
        }
    }
    return box;
}

Vec sample_box(const CZono& z, std::mt19937_64& rng) {
    z.validate();
    if (z.num_constraints() != 0) {
        throw std::invalid_argument("sample_box: set has constraints");
    }
    Vec xi(z.num_generators());
    for (std::size_t j = 0; j < xi.size(); ++j) {
        if (!std::isfinite(z.h[j])) {
            throw std::invalid_argument("sample_box: unbounded generator");
        }
        std::uniform_real_distribution<double> u(-z.h[j], z.h[j]);
        xi[j] = z.h[j] == 0.0 ? 0.0 : u(rng);
    }
    return z.g * xi + z.c;
}

nlohmann::json to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::invalid_argument("matrix_from_json: expected array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = rows == 0 ? 0 : j[0].size();
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) {
            throw std::invalid_argument("matrix_from_json: ragged rows");
        }
        for (std::size_t jj = 0; jj < cols; ++jj) m(i, jj) = j[i][jj].get<double>();
    }
    return m;
}

nlohmann::json to_json(const CZono& z) {
    nlohmann::json out;
    out["g"] = to_json(z.g);
    out["c"] = z.c;
    out["a"] = to_json(z.a);
    out["b"] = z.b;
    nlohmann::json h = nlohmann::json::array();
    for (double hv : z.h) {
        if (std::isinf(hv)) {
            h.push_back("inf");
        } else {
            h.push_back(hv);
        }
    }
    out["h"] = h;
    return out;
}

CZono czono_from_json(const nlohmann::json& j) {
    CZono z;
    z.g = matrix_from_json(j.at("g"));
    z.c = j.at("c").get<Vec>();
    z.a = matrix_from_json(j.at("a"));
    z.b = j.at("b").get<Vec>();
    for (const auto& hv : j.at("h")) {
        if (hv.is_string()) {
            if (hv.get<std::string>() != "inf") {
                throw std::invalid_argument("czono_from_json: bad bound entry");
            }
            z.h.push_back(kInf);
        } else {
            z.h.push_back(hv.get<double>());
        }
    }
    if (z.a.rows() == 0) z.a = Matrix(0, z.num_generators());
    z.validate();
    return z;
}

}  // namespace smfkit

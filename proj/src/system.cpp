#include "smfkit/system.hpp"

#include <cmath>

#include "smfkit/linalg.hpp"

namespace smfkit {

void LinearSystem::finalize() {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.rows() != n || c.cols() != n) {
        throw std::invalid_argument("LinearSystem: inconsistent matrix shapes");
    }
    if (w.dim() != b.cols() || v.dim() != c.rows() || x0_true.dim() != n) {
        throw std::invalid_argument("LinearSystem: noise/initial set dimensions mismatch");
    }
    if (rank(a) != n) {
        throw std::invalid_argument("LinearSystem: state matrix must be nonsingular");
    }
    const Box wh = interval_hull(w);   // throws when empty
    const Box vh = interval_hull(v);
    const Box xh = interval_hull(x0_true);
    if (!wh.bounded() || !vh.bounded() || !xh.bounded()) {
        throw std::invalid_argument("LinearSystem: noise and initial ranges must be bounded");
    }
    d_w = wh.diameter();
    d_v = vh.diameter();
}

nlohmann::json to_json(const LinearSystem& sys) {
    nlohmann::json j;
    j["a"] = to_json(sys.a);
    j["b"] = to_json(sys.b);
    j["c"] = to_json(sys.c);
    j["w"] = to_json(sys.w);
    j["v"] = to_json(sys.v);
    j["x0"] = to_json(sys.x0_true);
    return j;
}

LinearSystem system_from_json(const nlohmann::json& j) {
    LinearSystem sys;
    sys.a = matrix_from_json(j.at("a"));
    sys.b = matrix_from_json(j.at("b"));
    sys.c = matrix_from_json(j.at("c"));
    sys.w = czono_from_json(j.at("w"));
    sys.v = czono_from_json(j.at("v"));
    sys.x0_true = czono_from_json(j.at("x0"));
    sys.finalize();
    return sys;
}

Matrix observability_matrix(const Matrix& a, const Matrix& c, std::size_t powers) {
    Matrix out(0, a.cols());
    Matrix cai = c;
    for (std::size_t i = 0; i < powers; ++i) {
        out = vstack(out, cai);
        if (i + 1 < powers) cai = cai * a;
    }
    return out;
}

std::optional<std::size_t> observability_index(const Matrix& a, const Matrix& c) {
    const std::size_t n = a.rows();
    if (a.cols() != n || c.cols() != n) {
        throw std::invalid_argument("observability_index: dimension mismatch");
    }
    if (n == 0) return 0;
    Matrix stacked(0, n);
    Matrix cai = c;
    for (std::size_t mu = 1; mu <= n; ++mu) {
        stacked = vstack(stacked, cai);
        if (rank(stacked) == n) return mu;
        cai = cai * a;
    }
    return std::nullopt;
}

ObservabilityDecomposition decompose(const Matrix& a, const Matrix& b, const Matrix& c) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.rows() != n || c.cols() != n) {
        throw std::invalid_argument("decompose: dimension mismatch");
    }
    const Matrix obs = observability_matrix(a, c, n);
    const SvdResult d = svd(obs);
    // the stacked powers accumulate rounding noise well past the plain
    // eps-scaled cutoff; widen it and keep the warning band for close calls
    const double tol = 1e3 * rank_tolerance(obs, d.s);
    std::size_t n_o = 0;
    bool warn = false;
    for (double sv : d.s) {
        if (sv > tol) ++n_o;
        if (sv > tol && sv <= 10.0 * tol) warn = true;
    }

    ObservabilityDecomposition dec;
    dec.n_o = n_o;
    dec.rank_warning = warn;
    // right singular vectors: first n_o span the observability-matrix row
    // space, the rest its orthogonal complement (the unobservable subspace)
    dec.p = n_o == n ? Matrix::identity(n) : d.v.transpose();

    const Matrix pt = dec.p.transpose();
    const Matrix at = dec.p * a * pt;
    const Matrix bt = dec.p * b;
    const Matrix ct = c * pt;
    const std::size_t n_u = n - n_o;
    dec.a_o = at.block(0, 0, n_o, n_o);
    dec.a_21 = at.block(n_o, 0, n_u, n_o);
    dec.a_obar = at.block(n_o, n_o, n_u, n_u);
    dec.b_o = bt.block(0, 0, n_o, bt.cols());
    dec.b_obar = bt.block(n_o, 0, n_u, bt.cols());
    dec.c_o = ct.block(0, 0, ct.rows(), n_o);

    const auto mu = observability_index(dec.a_o, dec.c_o);
    if (!mu) {
        throw numerical_error("decompose: observable block failed its observability check");
    }
    dec.mu_o = *mu;
    return dec;
}

bool is_detectable(const ObservabilityDecomposition& dec) {
    if (dec.a_obar.rows() == 0) return true;
    return spectral_radius(dec.a_obar) < 1.0 - 1e-9;
}

namespace {

// max_k gamma^{-k} ||f^k||_inf, truncated once the terms stay below 1 for 20
// consecutive powers (they converge to 0 for gamma > rho(f))
double geometric_envelope(const Matrix& f, double gamma) {
    double best = 1.0;  // k = 0 term
    double scale = 1.0;
    Matrix p = Matrix::identity(f.rows());
    int below = 0;
    for (std::size_t k = 1; k <= 100000 && below < 20; ++k) {
        p = p * f;
        scale /= gamma;
        const double term = scale * norm_inf(p);
        best = std::max(best, term);
        below = term < 1.0 ? below + 1 : 0;
    }
    return best;
}

}  // namespace

double upsilon_inf(const Matrix& a_obar) {
    if (a_obar.rows() == 0) return 0.0;
    if (a_obar.rows() != a_obar.cols()) {
        throw std::invalid_argument("upsilon_inf: matrix must be square");
    }
    const double rho = spectral_radius(a_obar);
    if (rho >= 1.0 - 1e-9) {
        throw std::invalid_argument("upsilon_inf: spectral radius must be < 1");
    }
    const double lo = rho + 1e-6;
    const double hi = 1.0 - 1e-6;
    if (lo >= hi) {
        throw std::invalid_argument("upsilon_inf: spectral radius too close to 1");
    }
    const auto objective = [&a_obar](double gamma) {
        return geometric_envelope(a_obar, gamma) / (1.0 - gamma);
    };

    // coarse grid, then a few golden-section refinements around the minimizer
    const int grid = 200;
    int best_i = 0;
    double best_f = std::numeric_limits<double>::infinity();
    Vec gammas(grid);
    for (int i = 0; i < grid; ++i) {
        gammas[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / grid;
        const double f = objective(gammas[i]);
        if (f < best_f) {
            best_f = f;
            best_i = i;
        }
    }
    double a = gammas[std::max(best_i - 1, 0)];
    double b = gammas[std::min(best_i + 1, grid - 1)];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    for (int it = 0; it < 3; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = objective(x2);
        }
    }
    return std::min({best_f, f1, f2});
}

OitBound oit_bound(const Matrix& a, const Matrix& b, const Matrix& c, double d_w, double d_v,
                   std::size_t delta) {
    const auto mu = observability_index(a, c);
    if (!mu) {
        throw std::invalid_argument("oit_bound: system is not observable");
    }
    if (delta + 1 < *mu) {
        throw std::invalid_argument("oit_bound: window too short for the observability index");
    }
    const Matrix a_inv = inverse(a);

    OitBound out;
    out.delta = delta;
    // rows C a^-delta, ..., C a^-1, C
    Matrix o(0, a.cols());
    Matrix ca = c;  // c a^{-l}
    std::vector<Matrix> c_ainv_pows(delta + 1);
    c_ainv_pows[0] = c;
    for (std::size_t l = 1; l <= delta; ++l) {
        ca = ca * a_inv;
        c_ainv_pows[l] = ca;
    }
    for (std::size_t l = delta + 1; l-- > 0;) {
        o = vstack(o, c_ainv_pows[l]);
    }
    out.o_delta = o;
    const SvdResult d = svd(o);
    out.sigma_min = d.s.back();

    double sum = 0.0;
    for (std::size_t j = 0; j <= delta; ++j) {
        double term = d_v;
        for (std::size_t l = 1; l + j <= delta; ++l) {
            term += norm_two(c_ainv_pows[l] * b) * d_w;
        }
        sum += term * term;
    }
    out.d_bar = std::sqrt(sum) / out.sigma_min;
    return out;
}

namespace {

// block-diagonal matrix with eigenvalue moduli uniform in [0.05, 0.95];
// complex pairs become 2x2 rotation-scaled blocks
Matrix random_stable_spectrum(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> modulus(0.05, 0.95);
    std::uniform_real_distribution<double> angle(0.1, 3.0415);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Matrix d(n, n);
    std::size_t i = 0;
    while (i < n) {
        const double r = modulus(rng);
        if (i + 1 < n && coin(rng) < 0.5) {
            const double th = angle(rng);
            d(i, i) = r * std::cos(th);
            d(i, i + 1) = r * std::sin(th);
            d(i + 1, i) = -r * std::sin(th);
            d(i + 1, i + 1) = r * std::cos(th);
            i += 2;
        } else {
            d(i, i) = coin(rng) < 0.5 ? r : -r;
            i += 1;
        }
    }
    return d;
}

Matrix random_gaussian(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = gauss(rng);
    }
    return m;
}

void attach_default_ranges(LinearSystem& sys, std::size_t n, std::size_t p, std::size_t m) {
    sys.w = CZono::from_box(Vec(p, 0.0), Vec(p, 1.0));
    sys.v = CZono::from_box(Vec(m, 0.0), Vec(m, 1.0));
    sys.x0_true = CZono::from_box(Vec(n, 0.0), Vec(n, 10.0));
}

}  // namespace

LinearSystem random_observable_system(std::uint64_t seed, std::size_t n, std::size_t p,
                                      std::size_t m) {
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const Matrix q = random_orthogonal(n, rng);
        const Matrix a = q * random_stable_spectrum(n, rng) * q.transpose();
        const Matrix b = random_gaussian(n, p, rng);
        const Matrix c = random_gaussian(m, n, rng);
        if (!observability_index(a, c) || rank(a) != n) continue;
        LinearSystem sys;
        sys.a = a;
        sys.b = b;
        sys.c = c;
        attach_default_ranges(sys, n, p, m);
        sys.finalize();
        return sys;
    }
    throw numerical_error("random_observable_system: resampling failed to find a system");
}

LinearSystem random_detectable_system(std::uint64_t seed, std::size_t n, std::size_t n_o,
                                      std::size_t p, std::size_t m) {
    if (n_o > n) {
        throw std::invalid_argument("random_detectable_system: n_o exceeds n");
    }
    std::mt19937_64 rng(seed);
    const std::size_t n_u = n - n_o;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        // observable block by the same spectrum recipe
        const Matrix qo = random_orthogonal(n_o, rng);
        const Matrix a_o = qo * random_stable_spectrum(n_o, rng) * qo.transpose();
        const Matrix b_o = random_gaussian(n_o, p, rng);
        const Matrix c_o = random_gaussian(m, n_o, rng);
        if (!observability_index(a_o, c_o)) continue;

        Matrix a_obar = random_gaussian(n_u, n_u, rng);
        const double rho = spectral_radius(a_obar);
        if (rho > 0.0) a_obar = (0.5 / rho) * a_obar;
        Matrix a_21(n_u, n_o);
        Matrix b_obar(n_u, p);
        for (std::size_t i = 0; i < n_u; ++i) {
            for (std::size_t j = 0; j < n_o; ++j) a_21(i, j) = unit(rng);
            for (std::size_t j = 0; j < p; ++j) b_obar(i, j) = unit(rng);
        }

        Matrix at(n, n);
        at.set_block(0, 0, a_o);
        at.set_block(n_o, 0, a_21);
        at.set_block(n_o, n_o, a_obar);
        const Matrix bt = vstack(b_o, b_obar);
        const Matrix ct = hstack(c_o, Matrix(m, n_u));

        const Matrix perm = random_orthogonal(n, rng);
        LinearSystem sys;
        sys.a = perm.transpose() * at * perm;
        sys.b = perm.transpose() * bt;
        sys.c = ct * perm;
        if (rank(sys.a) != n) continue;
        attach_default_ranges(sys, n, p, m);
        sys.finalize();
        return sys;
    }
    throw numerical_error("random_detectable_system: resampling failed to find a system");
}

}  // namespace smfkit

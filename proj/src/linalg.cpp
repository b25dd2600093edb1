#include "smfkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace smfkit {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double sign_like(double a, double b) { return b >= 0.0 ? std::fabs(a) : -std::fabs(a); }

}  // namespace

SvdResult svd(const Matrix& m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    Matrix a = m;
    Matrix v = Matrix::identity(cols);

    // one-sided Jacobi: rotate column pairs until all are mutually orthogonal.
    // columns whose norm drops to rounding noise are treated as zero, else the
    // relative test below keeps chasing noise and never converges
    double fro2 = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) fro2 += m(i, j) * m(i, j);
    }
    const double dead2 = kEps * kEps * fro2;
    const std::size_t max_sweeps = 128;
    bool converged = cols < 2;
    for (std::size_t sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        converged = true;
        for (std::size_t p = 0; p + 1 < cols; ++p) {
            for (std::size_t q = p + 1; q < cols; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t i = 0; i < rows; ++i) {
                    app += a(i, p) * a(i, p);
                    aqq += a(i, q) * a(i, q);
                    apq += a(i, p) * a(i, q);
                }
                if (app <= dead2 || aqq <= dead2 || apq == 0.0 ||
                    std::fabs(apq) <= 1e2 * kEps * std::sqrt(app * aqq)) {
                    continue;
                }
                converged = false;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = sign_like(1.0, tau) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < rows; ++i) {
                    const double ap = a(i, p);
                    const double aq = a(i, q);
                    a(i, p) = c * ap - s * aq;
                    a(i, q) = s * ap + c * aq;
                }
                for (std::size_t i = 0; i < cols; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
    }
    if (!converged) {
        throw numerical_error("svd: Jacobi sweeps did not converge");
    }

    Vec s(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
        double n2 = 0.0;
        for (std::size_t i = 0; i < rows; ++i) n2 += a(i, j) * a(i, j);
        s[j] = std::sqrt(n2);
    }

    // sort singular values descending
    std::vector<std::size_t> order(cols);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&s](std::size_t x, std::size_t y) { return s[x] > s[y]; });

    SvdResult out;
    out.u = Matrix(rows, cols);
    out.v = Matrix(cols, cols);
    out.s.resize(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        const std::size_t src = order[j];
        out.s[j] = s[src];
        for (std::size_t i = 0; i < cols; ++i) out.v(i, j) = v(i, src);
        if (s[src] > 0.0) {
            for (std::size_t i = 0; i < rows; ++i) out.u(i, j) = a(i, src) / s[src];
        }
    }
    return out;
}

double rank_tolerance(const Matrix& m, const Vec& singular_values) {
    const double smax = singular_values.empty() ? 0.0 : singular_values.front();
    return static_cast<double>(std::max(m.rows(), m.cols())) * kEps * smax;
}

std::size_t rank(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    const SvdResult d = svd(m);
    const double tol = rank_tolerance(m, d.s);
    std::size_t r = 0;
    for (double sv : d.s) {
        if (sv > tol) ++r;
    }
    return r;
}

double norm_two(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    return svd(m).s.front();
}

Matrix pinv(const Matrix& m) {
    const SvdResult d = svd(m);
    const double tol = rank_tolerance(m, d.s);
    Vec inv(d.s.size(), 0.0);
    for (std::size_t i = 0; i < d.s.size(); ++i) {
        if (d.s[i] > tol) inv[i] = 1.0 / d.s[i];
    }
    return d.v * Matrix::diagonal(inv) * d.u.transpose();
}

Matrix kernel_basis(const Matrix& m) {
    const SvdResult d = svd(m);
    const double tol = rank_tolerance(m, d.s);
    std::size_t r = 0;
    for (double sv : d.s) {
        if (sv > tol) ++r;
    }
    return d.v.block(0, r, m.cols(), m.cols() - r);
}

namespace {

// Householder reduction to upper Hessenberg form (in place)
void hessenberg(Matrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double scale = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) scale += std::fabs(a(i, k));
        if (scale == 0.0) continue;
        Vec w(n, 0.0);
        double h = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            w[i] = a(i, k) / scale;
            h += w[i] * w[i];
        }
        double g = -sign_like(std::sqrt(h), w[k + 1]);
        h -= w[k + 1] * g;
        w[k + 1] -= g;
        if (h == 0.0) continue;
        // apply P = I - w w^T / h from both sides
        for (std::size_t j = 0; j < n; ++j) {
            double f = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) f += w[i] * a(i, j);
            f /= h;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= f * w[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double f = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) f += a(i, j) * w[j];
            f /= h;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * w[j];
        }
        a(k + 1, k) = scale * g;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("eigenvalues: matrix must be square");
    }
    const int n = static_cast<int>(m.rows());
    if (n == 0) return {};
    Matrix h = m;
    hessenberg(h);
    auto a = [&h](int i, int j) -> double& {
        return h(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    };

    std::vector<std::complex<double>> w(n);
    double anorm = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(a(i, j));
    }
    if (anorm == 0.0) anorm = 1.0;

    // Francis double-shift QR with deflation
    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        for (;;) {
            int l;
            for (l = nn; l >= 1; --l) {
                double s = std::fabs(a(l - 1, l - 1)) + std::fabs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::fabs(a(l, l - 1)) <= kEps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                w[nn--] = {x + t, 0.0};
                break;
            }
            double y = a(nn - 1, nn - 1);
            double ww = a(nn, nn - 1) * a(nn - 1, nn);
            if (l == nn - 1) {
                double p = 0.5 * (y - x);
                double q = p * p + ww;
                double z = std::sqrt(std::fabs(q));
                x += t;
                if (q >= 0.0) {
                    z = p + sign_like(z, p);
                    w[nn - 1] = w[nn] = {x + z, 0.0};
                    if (z != 0.0) w[nn] = {x - ww / z, 0.0};
                } else {
                    w[nn] = {x + p, z};
                    w[nn - 1] = {x + p, -z};
                }
                nn -= 2;
                break;
            }
            if (its == 90) {
                throw numerical_error("eigenvalues: QR iteration did not converge");
            }
            if (its != 0 && its % 15 == 0) {
                // exceptional shift to break cycling
                t += x;
                for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                double s = std::fabs(a(nn, nn - 1)) + std::fabs(a(nn - 1, nn - 2));
                y = x = 0.75 * s;
                ww = -0.4375 * s * s;
            }
            ++its;
            double p = 0.0, q = 0.0, r = 0.0;
            int mstart;
            for (mstart = nn - 2; mstart >= l; --mstart) {
                double z = a(mstart, mstart);
                double rr = x - z;
                double ss = y - z;
                p = (rr * ss - ww) / a(mstart + 1, mstart) + a(mstart, mstart + 1);
                q = a(mstart + 1, mstart + 1) - z - rr - ss;
                r = a(mstart + 2, mstart + 1);
                double scale = std::fabs(p) + std::fabs(q) + std::fabs(r);
                p /= scale;
                q /= scale;
                r /= scale;
                if (mstart == l) break;
                double u = std::fabs(a(mstart, mstart - 1)) * (std::fabs(q) + std::fabs(r));
                double vv = std::fabs(p) *
                            (std::fabs(a(mstart - 1, mstart - 1)) + std::fabs(z) +
                             std::fabs(a(mstart + 1, mstart + 1)));
                if (u <= kEps * vv) break;
            }
            for (int i = mstart + 2; i <= nn; ++i) {
                a(i, i - 2) = 0.0;
                if (i != mstart + 2) a(i, i - 3) = 0.0;
            }
            for (int k = mstart; k <= nn - 1; ++k) {
                if (k != mstart) {
                    p = a(k, k - 1);
                    q = a(k + 1, k - 1);
                    r = (k + 1 != nn) ? a(k + 2, k - 1) : 0.0;
                    double xx = std::fabs(p) + std::fabs(q) + std::fabs(r);
                    if (xx != 0.0) {
                        p /= xx;
                        q /= xx;
                        r /= xx;
                    }
                    x = xx;
                }
                double s = sign_like(std::sqrt(p * p + q * q + r * r), p);
                if (s == 0.0) continue;
                if (k == mstart) {
                    if (l != mstart) a(k, k - 1) = -a(k, k - 1);
                } else {
                    a(k, k - 1) = -s * x;
                }
                p += s;
                x = p / s;
                double yy = q / s;
                double zz = r / s;
                q /= p;
                r /= p;
                for (int j = k; j <= nn; ++j) {
                    double pp = a(k, j) + q * a(k + 1, j);
                    if (k + 1 != nn) {
                        pp += r * a(k + 2, j);
                        a(k + 2, j) -= pp * zz;
                    }
                    a(k + 1, j) -= pp * yy;
                    a(k, j) -= pp * x;
                }
                const int mmin = nn < k + 3 ? nn : k + 3;
                for (int i = l; i <= mmin; ++i) {
                    double pp = x * a(i, k) + yy * a(i, k + 1);
                    if (k + 1 != nn) {
                        pp += zz * a(i, k + 2);
                        a(i, k + 2) -= pp * r;
                    }
                    a(i, k + 1) -= pp * q;
                    a(i, k) -= pp;
                }
            }
        }
    }
    return w;
}

double spectral_radius(const Matrix& m) {
    double rho = 0.0;
    for (const auto& ev : eigenvalues(m)) rho = std::max(rho, std::abs(ev));
    return rho;
}

Vec matrix_power_norm_seq(const Matrix& f, MatrixNorm which, std::size_t k_max) {
    if (f.rows() != f.cols()) {
        throw std::invalid_argument("matrix_power_norm_seq: matrix must be square");
    }
    Vec out;
    out.reserve(k_max + 1);
    Matrix p = Matrix::identity(f.rows());
    for (std::size_t k = 0; k <= k_max; ++k) {
        out.push_back(which == MatrixNorm::two ? norm_two(p) : norm_inf(p));
        if (k < k_max) p = p * f;
    }
    return out;
}

Vec solve(const Matrix& a, const Vec& b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) {
        throw std::invalid_argument("solve: dimensions mismatch");
    }
    // Householder QR, then back substitution
    Matrix r = a;
    Vec y = b;
    for (std::size_t k = 0; k < n; ++k) {
        double nrm = 0.0;
        for (std::size_t i = k; i < n; ++i) nrm += r(i, k) * r(i, k);
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) continue;
        const double alpha = r(k, k) >= 0 ? -nrm : nrm;
        Vec w(n, 0.0);
        w[k] = r(k, k) - alpha;
        for (std::size_t i = k + 1; i < n; ++i) w[i] = r(i, k);
        double h = 0.0;
        for (std::size_t i = k; i < n; ++i) h += w[i] * w[i];
        if (h == 0.0) continue;
        for (std::size_t j = k; j < n; ++j) {
            double f = 0.0;
            for (std::size_t i = k; i < n; ++i) f += w[i] * r(i, j);
            f = 2.0 * f / h;
            for (std::size_t i = k; i < n; ++i) r(i, j) -= f * w[i];
        }
        double f = 0.0;
        for (std::size_t i = k; i < n; ++i) f += w[i] * y[i];
        f = 2.0 * f / h;
        for (std::size_t i = k; i < n; ++i) y[i] -= f * w[i];
    }
    Vec x(n, 0.0);
    const double tol = static_cast<double>(n) * kEps * norm_inf(a);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= r(ii, j) * x[j];
        if (std::fabs(r(ii, ii)) <= tol) {
            throw numerical_error("solve: matrix is singular to working precision");
        }
        x[ii] = s / r(ii, ii);
    }
    return x;
}

Matrix inverse(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix out(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Vec e(n, 0.0);
        e[j] = 1.0;
        const Vec x = solve(a, e);
        for (std::size_t i = 0; i < n; ++i) out(i, j) = x[i];
    }
    return out;
}

Matrix matrix_power(const Matrix& a, std::size_t k) {
    Matrix p = Matrix::identity(a.rows());
    for (std::size_t i = 0; i < k; ++i) p = p * a;
    return p;
}

Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) g(i, j) = gauss(rng);
    }
    // modified Gram-Schmidt; Gaussian columns are independent a.s.
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double proj = 0.0;
            for (std::size_t i = 0; i < n; ++i) proj += g(i, k) * g(i, j);
            for (std::size_t i = 0; i < n; ++i) g(i, j) -= proj * g(i, k);
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm += g(i, j) * g(i, j);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-12) {
            // astronomically unlikely; resample
            return random_orthogonal(n, rng);
        }
        for (std::size_t i = 0; i < n; ++i) g(i, j) /= nrm;
    }
    return g;
}

}  // namespace smfkit

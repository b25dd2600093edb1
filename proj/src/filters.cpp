#include "smfkit/filters.hpp"

#include <cmath>
#include <limits>

#include "smfkit/linalg.hpp"

namespace smfkit {

ClassicalSmfState classical_init(const CZono& x0_guess) {
    x0_guess.validate();
    return {x0_guess, x0_guess, -1};
}

ClassicalSmfState classical_step(const ClassicalSmfState& state, const Vec& y,
                                 const LinearSystem& sys) {
    ClassicalSmfState next;
    next.k = state.k + 1;
    // no prediction on the very first measurement
    next.prior = next.k == 0 ? state.posterior : predict(state.posterior, sys.a, sys.b, sys.w);
    next.posterior = update(next.prior, sys.c, y, sys.v);
    return next;
}

OitSets build_oit(const LinearSystem& sys, std::span<const Vec> window, std::size_t delta) {
    if (window.size() != delta + 1) {
        throw std::invalid_argument("build_oit: window must hold delta + 1 measurements");
    }
    // powers of a and the accumulated process-noise terms, shared across sets
    std::vector<Matrix> a_pow(delta + 1);
    a_pow[0] = Matrix::identity(sys.state_dim());
    for (std::size_t q = 1; q <= delta; ++q) a_pow[q] = a_pow[q - 1] * sys.a;

    OitSets out;
    for (std::size_t j = 0; j <= delta; ++j) {
        const std::size_t back = delta - j;  // k - i
        CZono o = linear_image(a_pow[back], measurement_set(sys.c, window[j], sys.v));
        for (std::size_t q = 0; q < back; ++q) {
            o = minkowski_sum(o, linear_image(a_pow[q] * sys.b, sys.w));
        }
        out.observation_sets.push_back(std::move(o));
    }
    out.intersected = out.observation_sets.front();
    for (std::size_t j = 1; j <= delta; ++j) {
        out.intersected = intersect(out.intersected, out.observation_sets[j]);
    }
    return out;
}

CZono state_evolution_set(const LinearSystem& sys, const CZono& x0_range, std::size_t k) {
    Matrix a_pow = Matrix::identity(sys.state_dim());
    std::vector<Matrix> pows{a_pow};
    for (std::size_t q = 1; q <= k; ++q) {
        a_pow = a_pow * sys.a;
        pows.push_back(a_pow);
    }
    CZono e = linear_image(pows[k], x0_range);
    for (std::size_t q = 0; q < k; ++q) {
        e = minkowski_sum(e, linear_image(pows[q] * sys.b, sys.w));
    }
    return e;
}

OitCzFilter::OitCzFilter(const LinearSystem& sys, const ObservabilityDecomposition& dec,
                         const CZono& x0_guess, OitCzOptions options)
    : sys_(sys), dec_(dec), options_(options) {
    if (!is_detectable(dec_)) {
        throw std::invalid_argument("OitCzFilter: system must be detectable");
    }
    if (options_.epsilon <= 0.0) {
        throw std::invalid_argument("OitCzFilter: epsilon must be positive");
    }
    if (options_.delta_bar + 1 < dec_.mu_o) {
        throw std::invalid_argument("OitCzFilter: window too short for the observability index");
    }
    const std::size_t n_u = sys_.state_dim() - dec_.n_o;
    if (n_u > 0 && options_.delta_bar == 0) {
        throw std::invalid_argument(
            "OitCzFilter: a zero-length window cannot bound unobservable coordinates");
    }
    x0_guess.validate();
    if (x0_guess.dim() != sys_.state_dim()) {
        throw std::invalid_argument("OitCzFilter: initial guess dimension mismatch");
    }
    upsilon_ = upsilon_inf(dec_.a_obar);
    p_t_ = dec_.p.transpose();
    guess_obar_ = project(linear_image(dec_.p, x0_guess), dec_.n_o, n_u);
    cls_ = classical_init(x0_guess);
    z_ = x0_guess;
    a_obar_pow_ = Matrix::identity(n_u);
    c_obar_ = Vec(n_u, 0.0);
}

CZono OitCzFilter::reset_prior(double alpha) const {
    const CZono cube =
        CZono::from_box(Vec(dec_.n_o, 0.0), Vec(dec_.n_o, alpha));
    return linear_image(p_t_, cartesian_product(cube, guess_obar_));
}

CZono OitCzFilter::window_start_prior() const {
    const std::size_t n = sys_.state_dim();
    const std::size_t n_u = n - dec_.n_o;
    CZono obs_part = CZono::whole_space(dec_.n_o);
    if (options_.refine_prior && !hull_ring_.empty() && hull_ring_.front().bounded()) {
        const Matrix p_o = dec_.p.block(0, 0, dec_.n_o, n);
        obs_part = linear_image(p_o, CZono::from_box(hull_ring_.front()));
    }
    if (n_u == 0) return linear_image(p_t_, obs_part);
    return linear_image(p_t_, cartesian_product(obs_part, CZono::from_box(t_obar_ring_.front())));
}

void OitCzFilter::step(const Vec& y) {
    const std::size_t n = sys_.state_dim();
    const std::size_t n_u = n - dec_.n_o;
    const std::size_t db = options_.delta_bar;
    const std::size_t k = static_cast<std::size_t>(++k_);

    window_.push_back(y);
    if (window_.size() > db + 1) window_.pop_front();
    const std::vector<Vec> window_vec(window_.begin(), window_.end());

    if (k < db) {
        // window not yet filled: classical recursion with alpha-cube resetting
        cls_ = classical_step(cls_, y, sys_);
        CZono z = cls_.posterior;
        CZono prior_for_hull = cls_.prior;
        last_phase_ = FilterPhase::classical;
        if (is_empty(z)) {
            last_phase_ = FilterPhase::reset;
            bool found = false;
            for (double alpha = std::max(1.0, alpha_last_); alpha <= 1.9e19; alpha *= 2.0) {
                CZono prior;
                z = filter_image(reset_prior(alpha), sys_.a, sys_.b, sys_.c, sys_.w, sys_.v,
                                 window_vec, &prior);
                if (!is_empty(z)) {
                    prior_for_hull = prior;
                    alpha_last_ = alpha;
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw numerical_error("OitCzFilter: alpha doubling exhausted during reset");
            }
            cls_.posterior = z;  // the recursion continues from the reset estimate
        }
        z_ = z;
        if (n_u > 0) {
            t_obar_ring_.push_back(
                interval_hull(project(linear_image(dec_.p, prior_for_hull), dec_.n_o, n_u)));
        } else {
            t_obar_ring_.push_back(Box{});
        }
    } else {
        // fixed-window rebuild from the stored window-start prior
        CZono z = filter_image(window_start_prior(), sys_.a, sys_.b, sys_.c, sys_.w, sys_.v,
                               window_vec, nullptr);
        const bool refined =
            options_.refine_prior && !hull_ring_.empty() && hull_ring_.front().bounded();
        bool z_empty = is_empty(z);
        if (refined && z_empty) {
            // the refined prior is a heuristic; fall back to the guaranteed one
            CZono obs_part = CZono::whole_space(dec_.n_o);
            CZono start = n_u == 0
                              ? linear_image(p_t_, obs_part)
                              : linear_image(p_t_, cartesian_product(
                                                       obs_part,
                                                       CZono::from_box(t_obar_ring_.front())));
            z = filter_image(start, sys_.a, sys_.b, sys_.c, sys_.w, sys_.v, window_vec, nullptr);
            z_empty = is_empty(z);
        }
        z_ = z;
        last_phase_ = FilterPhase::windowed;

        if (n_u > 0 && z_empty) {
            // degenerate corner: keep the inflation recursion running on the
            // previous quantities so the ring stays aligned
            const double alpha_k =
                norm_inf(a_obar_pow_) * d_inf_ref_ + upsilon_ * ell_ + options_.epsilon;
            t_obar_ring_.push_back(Box{c_obar_, Vec(n_u, alpha_k)});
            c_obar_ = dec_.a_obar * c_obar_;
            a_obar_pow_ = a_obar_pow_ * dec_.a_obar;
        } else if (n_u > 0) {
            if (k == db) {
                const Box zo_bar =
                    interval_hull(project(linear_image(dec_.p, z_), dec_.n_o, n_u));
                c_obar_ = zo_bar.center;
                d_inf_ref_ = zo_bar.diameter_inf();
                ell_ = 0.0;
                a_obar_pow_ = Matrix::identity(n_u);
            }
            // inflow into the unobservable coordinates from the observable
            // block and the process noise
            const CZono zo = project(linear_image(dec_.p, z_), 0, dec_.n_o);
            const CZono inflow = minkowski_sum(linear_image(dec_.a_21, zo),
                                               linear_image(dec_.b_obar, sys_.w));
            const Box in_box = interval_hull(inflow);
            // the inflation radius uses the running max from the previous step
            const double alpha_k =
                norm_inf(a_obar_pow_) * d_inf_ref_ + upsilon_ * ell_ + options_.epsilon;
            t_obar_ring_.push_back(Box{c_obar_, Vec(n_u, alpha_k)});
            ell_ = std::max(ell_, in_box.max_half_width());
            c_obar_ = dec_.a_obar * c_obar_ + in_box.center;
            a_obar_pow_ = a_obar_pow_ * dec_.a_obar;
        } else {
            t_obar_ring_.push_back(Box{});
        }
    }
    while (t_obar_ring_.size() > db) t_obar_ring_.pop_front();

    last_hull_.reset();
    if (options_.refine_prior) {
        if (!is_empty(z_)) {
            last_hull_ = interval_hull(z_);
            hull_ring_.push_back(*last_hull_);
        } else {
            hull_ring_.push_back(Box{Vec(n, 0.0), Vec(n, std::numeric_limits<double>::infinity())});
        }
        while (hull_ring_.size() > db) hull_ring_.pop_front();
    }

    if (trace_) trace_(k, last_phase_, z_);
}

}  // namespace smfkit

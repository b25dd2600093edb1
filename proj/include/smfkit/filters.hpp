#ifndef SMFKIT_FILTERS_HPP
#define SMFKIT_FILTERS_HPP

#include <deque>
#include <functional>
#include <optional>

#include "smfkit/system.hpp"

namespace smfkit {

// classical set-membership filter: predict with the dynamics, then intersect
// with the measurement strip.  An empty posterior is a legal result and
// propagates (no resetting here).
struct ClassicalSmfState {
    CZono posterior;
    CZono prior;
    long k = -1;
};

ClassicalSmfState classical_init(const CZono& x0_guess);
ClassicalSmfState classical_step(const ClassicalSmfState& state, const Vec& y,
                                 const LinearSystem& sys);

// window observation-information sets O_{k,i} (forward-propagated measurement
// sets plus accumulated process noise) and their intersection
struct OitSets {
    std::vector<CZono> observation_sets;  // i = k - delta .. k
    CZono intersected;
};

// window holds y_{k-delta} .. y_k (delta + 1 measurements)
OitSets build_oit(const LinearSystem& sys, std::span<const Vec> window, std::size_t delta);

// a^k x0_range + sum of a^q b W over q < k
CZono state_evolution_set(const LinearSystem& sys, const CZono& x0_range, std::size_t k);

enum class FilterPhase : int { classical = 0, reset = 1, windowed = 2 };

struct OitCzOptions {
    std::size_t delta_bar = 1;
    double epsilon = 0.01;
    // window-start prior refinement: reuse the stored interval hull of the
    // estimate at the window-start step instead of leaving the observable
    // coordinates unconstrained
    bool refine_prior = false;
};

// Stability-guaranteed filter: classical steps with alpha-cube resetting
// before the window fills, then fixed-window rebuilds from a bounded
// unobservable-coordinate box that is recursively inflated.
class OitCzFilter {
  public:
    using TraceHook = std::function<void(std::size_t k, FilterPhase, const CZono& estimate)>;

    OitCzFilter(const LinearSystem& sys, const ObservabilityDecomposition& dec,
                const CZono& x0_guess, OitCzOptions options);

    void step(const Vec& y);

    const CZono& estimate() const { return z_; }
    long current_step() const { return k_; }
    double upsilon() const { return upsilon_; }
    double ell() const { return ell_; }
    FilterPhase last_phase() const { return last_phase_; }
    const OitCzOptions& options() const { return options_; }
    // interval hull of the current estimate (cached when refine_prior is on)
    const std::optional<Box>& last_hull() const { return last_hull_; }

    void set_trace(TraceHook hook) { trace_ = std::move(hook); }

  private:
    CZono reset_prior(double alpha) const;
    CZono window_start_prior() const;

    LinearSystem sys_;
    ObservabilityDecomposition dec_;
    OitCzOptions options_;
    double upsilon_ = 0.0;
    CZono guess_obar_;  // unobservable projection of the transformed guess
    Matrix p_t_;        // P^T

    ClassicalSmfState cls_;
    CZono z_;
    long k_ = -1;
    FilterPhase last_phase_ = FilterPhase::classical;
    std::optional<Box> last_hull_;

    std::deque<Vec> window_;
    std::deque<Box> t_obar_ring_;  // unobservable-coordinate boxes per step
    std::deque<Box> hull_ring_;    // estimate hulls for prior refinement

    double ell_ = 0.0;
    Vec c_obar_;
    double d_inf_ref_ = 0.0;
    Matrix a_obar_pow_;
    double alpha_last_ = 1.0;

    TraceHook trace_;
};

}  // namespace smfkit

#endif

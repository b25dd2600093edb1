#ifndef SMFKIT_HARNESS_HPP
#define SMFKIT_HARNESS_HPP

#include <map>
#include <string>

#include "smfkit/filters.hpp"
#include "smfkit/metrics.hpp"

namespace smfkit {

struct Trajectory {
    std::vector<Vec> x;  // 0..H
    std::vector<Vec> y;
    std::vector<Vec> w;  // 0..H-1
    std::vector<Vec> v;
    std::uint64_t seed = 0;
};

// uniform noise draws from the box ranges; deterministic for a fixed seed
Trajectory simulate(const LinearSystem& sys, std::size_t horizon, std::uint64_t seed);

struct StepRecord {
    std::size_t trial = 0;
    std::size_t k = 0;
    double diam_hull = 0.0;
    double diam_inf = 0.0;
    double gap_bound = 0.0;
    bool contains = false;
    bool empty = false;
    std::uint64_t time_ns = 0;
    std::size_t ngen = 0;
    std::size_t ncon = 0;
};

using TrialRecords = std::vector<StepRecord>;

// header: trial,k,diam_hull,diam_inf,gap_bound,contains,empty,time_ns,ngen,ncon
void write_csv(const std::string& path, const TrialRecords& records);
// minimal polyline plot; one series per named value vector, shared x = index
void write_svg(const std::string& path, const std::string& title,
               const std::vector<std::pair<std::string, Vec>>& series);

// built-in demo systems
LinearSystem demo_observable_system();  // double integrator with position output
LinearSystem demo_detectable_system();  // contracting unobservable coordinate

struct DemoConfig {
    std::uint64_t seed = 7;
    std::size_t horizon = 50;
    std::string out_dir;            // empty: no files written
    bool svg = false;
    std::vector<std::size_t> probe_steps;  // steps at which set gaps are sampled
};

struct DemoSummary {
    std::map<std::string, TrialRecords> per_filter;
    // max pairwise support-sampled gap between the three estimates
    std::map<std::size_t, double> pairwise_gap_at;
    // max gap between any estimate and the delta-window intersection (observable demo)
    std::map<std::size_t, double> oit_gap_at;
};

DemoSummary demo_observable(const DemoConfig& config);
DemoSummary demo_detectable(const DemoConfig& config);

enum class SystemKind { observable, detectable };

struct MonteCarloConfig {
    SystemKind kind = SystemKind::observable;
    std::size_t trials = 100;
    std::size_t n = 10;
    std::size_t n_o = 8;   // detectable only
    std::size_t p = 10;
    std::size_t m = 10;
    double epsilon = 0.001;
    std::size_t horizon = 100;
    std::uint64_t seed = 1;
    std::string out_dir;
    bool svg = false;
    std::size_t threads = 0;  // 0: SMFKIT_THREADS env or hardware default
};

struct TrialSummary {
    std::size_t trial = 0;
    std::size_t delta_bar = 0;
    bool all_nonempty = false;
    bool contained_after_burn_in = false;  // x_k in Z_k for all k >= 2 delta_bar
    bool diameter_ratio_ok = false;        // late max <= 1.1 x mid-range max
    double max_diam_late = 0.0;
    double max_diam_mid = 0.0;
};

struct MonteCarloResult {
    TrialRecords records;
    std::vector<TrialSummary> trials;
    double fraction_passing = 0.0;  // all three checks per trial
};

MonteCarloResult montecarlo(const MonteCarloConfig& config);

struct TimingConfig {
    std::uint64_t seed = 11;
    std::size_t n = 10;
    std::size_t p = 10;
    std::size_t m = 10;
    std::size_t horizon = 100;
    std::string out_dir;
};

struct TimingResult {
    std::size_t delta_bar = 0;
    Vec oitcz_step_ns;       // per step
    Vec classical_step_ns;
    std::vector<std::size_t> classical_ngen;
    std::vector<std::size_t> classical_ncon;
    double late_early_ratio = 0.0;  // mean over k in [80,100] vs [delta_bar, delta_bar+20]
    long ngen_slope = -1;           // exact per-step generator increment, -1 if not linear
    long ncon_slope = -1;
};

TimingResult timing_bench(const TimingConfig& config);

}  // namespace smfkit

#endif

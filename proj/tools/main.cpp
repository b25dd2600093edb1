// command-line front end: experiment drivers, bound/decomposition queries
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "smfkit/harness.hpp"
#include "smfkit/linalg.hpp"

namespace {

using namespace smfkit;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalFailure = 3;

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

// accepts either a bare system object or {"system": {...}, ...}
LinearSystem load_system(const nlohmann::json& j) {
    if (j.contains("system")) return system_from_json(j.at("system"));
    return system_from_json(j);
}

void print_records_summary(const std::string& name, const TrialRecords& records) {
    std::size_t empties = 0, contained = 0;
    double max_diam = 0.0;
    for (const StepRecord& r : records) {
        if (r.empty) ++empties;
        if (r.contains) ++contained;
        max_diam = std::max(max_diam, r.diam_hull);
    }
    std::cout << name << ": steps=" << records.size() << " empty=" << empties
              << " contained=" << contained << " max_diam_hull=" << max_diam << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"set-membership filtering toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 7;
    std::size_t horizon = 0;
    bool svg = false;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--horizon", horizon, "number of steps (0: subcommand default)");
    app.add_option("--out", out_dir, "output directory for CSV/SVG");
    app.add_flag("--svg", svg, "also emit SVG plots");

    auto* cmd_demo_obs = app.add_subcommand("demo-observable", "three-filter observable demo");
    auto* cmd_demo_det = app.add_subcommand("demo-detectable", "three-filter detectable demo");
    auto* cmd_mc = app.add_subcommand("montecarlo", "randomized trials with the windowed filter");
    auto* cmd_timing = app.add_subcommand("timing", "per-step cost of both filters");
    auto* cmd_bound = app.add_subcommand("oit-bound", "window-intersection diameter bound");
    auto* cmd_decomp = app.add_subcommand("decompose", "observability decomposition report");

    std::string mc_kind = "observable";
    std::size_t mc_trials = 100, mc_n = 10, mc_no = 8, mc_p = 10, mc_m = 10;
    double mc_epsilon = 0.001;
    cmd_mc->add_option("--kind", mc_kind, "observable|detectable");
    cmd_mc->add_option("--trials", mc_trials, "number of trials");
    cmd_mc->add_option("--n", mc_n, "state dimension");
    cmd_mc->add_option("--n-o", mc_no, "observable-block dimension (detectable only)");
    cmd_mc->add_option("--p", mc_p, "input dimension");
    cmd_mc->add_option("--m", mc_m, "output dimension");
    cmd_mc->add_option("--epsilon", mc_epsilon, "inflation margin");

    std::size_t bound_delta = 2;
    cmd_bound->add_option("--delta", bound_delta, "window length minus one");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfigError;
    }

    nlohmann::json config;
    if (!config_path.empty()) config = load_json(config_path);
    if (config.contains("seed") && !app.count("--seed")) seed = config["seed"].get<std::uint64_t>();
    if (config.contains("horizon") && horizon == 0) horizon = config["horizon"].get<std::size_t>();

    if (cmd_demo_obs->parsed() || cmd_demo_det->parsed()) {
        const bool observable = cmd_demo_obs->parsed();
        DemoConfig dc;
        dc.seed = seed;
        dc.horizon = horizon != 0 ? horizon : (observable ? 50 : 30);
        dc.out_dir = out_dir;
        dc.svg = svg;
        const DemoSummary summary = observable ? demo_observable(dc) : demo_detectable(dc);
        for (const auto& [name, records] : summary.per_filter) {
            print_records_summary(name, records);
        }
        for (const auto& [k, gap] : summary.pairwise_gap_at) {
            std::cout << "pairwise_gap[k=" << k << "] = " << gap << "\n";
        }
        for (const auto& [k, gap] : summary.oit_gap_at) {
            std::cout << "window_intersection_gap[k=" << k << "] = " << gap << "\n";
        }
        return kExitOk;
    }

    if (cmd_mc->parsed()) {
        MonteCarloConfig mc;
        if (mc_kind == "observable") {
            mc.kind = SystemKind::observable;
        } else if (mc_kind == "detectable") {
            mc.kind = SystemKind::detectable;
            mc.p = mc.m = mc_no;
        } else {
            throw std::invalid_argument("montecarlo: --kind must be observable or detectable");
        }
        mc.trials = mc_trials;
        mc.n = mc_n;
        mc.n_o = mc_no;
        if (cmd_mc->count("--p") || mc.kind == SystemKind::observable) mc.p = mc_p;
        if (cmd_mc->count("--m") || mc.kind == SystemKind::observable) mc.m = mc_m;
        mc.epsilon = mc_epsilon;
        mc.horizon = horizon != 0 ? horizon : 100;
        mc.seed = seed;
        mc.out_dir = out_dir;
        mc.svg = svg;
        const MonteCarloResult result = montecarlo(mc);
        std::cout << "trials=" << mc.trials << " seed=" << mc.seed
                  << " horizon=" << mc.horizon << "\n";
        std::size_t nonempty = 0, contained = 0, bounded = 0;
        for (const TrialSummary& t : result.trials) {
            nonempty += t.all_nonempty;
            contained += t.contained_after_burn_in;
            bounded += t.diameter_ratio_ok;
        }
        std::cout << "all_nonempty=" << nonempty << "/" << mc.trials
                  << " contained=" << contained << "/" << mc.trials
                  << " bounded=" << bounded << "/" << mc.trials
                  << " fraction_passing=" << result.fraction_passing << "\n";
        return kExitOk;
    }

    if (cmd_timing->parsed()) {
        TimingConfig tc;
        tc.seed = seed;
        tc.horizon = horizon != 0 ? horizon : 100;
        tc.out_dir = out_dir;
        const TimingResult result = timing_bench(tc);
        std::cout << "delta_bar=" << result.delta_bar
                  << " late_early_ratio=" << result.late_early_ratio
                  << " classical_ngen_slope=" << result.ngen_slope
                  << " classical_ncon_slope=" << result.ncon_slope << "\n";
        return kExitOk;
    }

    if (cmd_bound->parsed()) {
        if (config_path.empty()) {
            throw std::invalid_argument("oit-bound: --config with a system JSON is required");
        }
        const LinearSystem sys = load_system(config);
        const OitBound bound = oit_bound(sys.a, sys.b, sys.c, sys.d_w, sys.d_v, bound_delta);
        std::cout << "delta=" << bound.delta << " sigma_min=" << bound.sigma_min
                  << " d_bar=" << bound.d_bar << "\n";
        return kExitOk;
    }

    if (cmd_decomp->parsed()) {
        if (config_path.empty()) {
            throw std::invalid_argument("decompose: --config with a system JSON is required");
        }
        const LinearSystem sys = load_system(config);
        const ObservabilityDecomposition dec = decompose(sys.a, sys.b, sys.c);
        std::cout << "n_o=" << dec.n_o << " mu_o=" << dec.mu_o
                  << " detectable=" << (is_detectable(dec) ? "yes" : "no") << "\n";
        std::cout << "p=\n" << to_string(dec.p) << "\n";
        if (dec.a_obar.rows() > 0) {
            std::cout << "a_obar=\n" << to_string(dec.a_obar) << "\n";
            std::cout << "rho(a_obar)=" << spectral_radius(dec.a_obar) << "\n";
        }
        return kExitOk;
    }

    return kExitConfigError;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const smfkit::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericalFailure;
    }
}

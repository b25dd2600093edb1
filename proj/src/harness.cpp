#include "smfkit/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "smfkit/linalg.hpp"

namespace smfkit {

namespace {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t idx) {
    // splitmix64 step over base + idx keeps per-trial streams decorrelated
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (idx + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t now_ns() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

}  // namespace

Trajectory simulate(const LinearSystem& sys, std::size_t horizon, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Trajectory traj;
    traj.seed = seed;
    Vec x = sample_box(sys.x0_true, rng);
    for (std::size_t k = 0; k <= horizon; ++k) {
        const Vec v = sample_box(sys.v, rng);
        traj.x.push_back(x);
        traj.y.push_back(sys.c * x + v);
        traj.v.push_back(v);
        if (k < horizon) {
            const Vec w = sample_box(sys.w, rng);
            traj.w.push_back(w);
            x = sys.a * x + sys.b * w;
        }
    }
    return traj;
}

void write_csv(const std::string& path, const TrialRecords& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out << "trial,k,diam_hull,diam_inf,gap_bound,contains,empty,time_ns,ngen,ncon\n";
    for (const StepRecord& r : records) {
        out << r.trial << ',' << r.k << ',' << format_double(r.diam_hull) << ','
            << format_double(r.diam_inf) << ',' << format_double(r.gap_bound) << ','
            << (r.contains ? 1 : 0) << ',' << (r.empty ? 1 : 0) << ',' << r.time_ns << ','
            << r.ngen << ',' << r.ncon << '\n';
    }
}

void write_svg(const std::string& path, const std::string& title,
               const std::vector<std::pair<std::string, Vec>>& series) {
    const double width = 800.0, height = 500.0, margin = 50.0;
    double lo = 0.0, hi = 1.0;
    std::size_t max_len = 1;
    bool first = true;
    for (const auto& [name, values] : series) {
        for (double v : values) {
            if (!std::isfinite(v)) continue;
            if (first) {
                lo = hi = v;
                first = false;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        max_len = std::max(max_len, values.size());
    }
    if (hi <= lo) hi = lo + 1.0;

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_svg: cannot open " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' viewBox='0 0 " << width << " " << height << "'>\n";
    out << "<text x='" << width / 2 << "' y='20' text-anchor='middle'>" << title << "</text>\n";
    out << "<line x1='" << margin << "' y1='" << height - margin << "' x2='" << width - margin
        << "' y2='" << height - margin << "' stroke='black'/>\n";
    out << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
        << height - margin << "' stroke='black'/>\n";
    out << "<text x='" << margin << "' y='" << margin - 8 << "' font-size='12'>"
        << format_double(hi) << "</text>\n";
    out << "<text x='" << margin << "' y='" << height - margin + 16 << "' font-size='12'>"
        << format_double(lo) << "</text>\n";
    std::size_t si = 0;
    for (const auto& [name, values] : series) {
        const char* color = palette[si % 5];
        out << "<polyline fill='none' stroke='" << color << "' points='";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!std::isfinite(values[i])) continue;
            const double px =
                margin + (width - 2 * margin) * static_cast<double>(i) /
                             static_cast<double>(std::max<std::size_t>(max_len - 1, 1));
            const double py =
                height - margin - (height - 2 * margin) * (values[i] - lo) / (hi - lo);
            out << px << ',' << py << ' ';
        }
        out << "'/>\n";
        out << "<text x='" << width - margin + 4 << "' y='" << margin + 16.0 * si
            << "' font-size='12' fill='" << color << "'>" << name << "</text>\n";
        ++si;
    }
    out << "</svg>\n";
}

LinearSystem demo_observable_system() {
    LinearSystem sys;
    sys.a = {{1.0, 1.0}, {0.0, 1.0}};
    sys.b = {{0.5}, {1.0}};
    sys.c = {{1.0, 0.0}};
    sys.w = CZono::interval(-1.0, 1.0);
    sys.v = CZono::interval(-1.0, 1.0);
    sys.x0_true = CZono::from_box({2.5, 2.5}, {0.5, 0.5});
    sys.finalize();
    return sys;
}

LinearSystem demo_detectable_system() {
    LinearSystem sys;
    sys.a = {{0.5, 1.0}, {0.0, 1.0}};
    sys.b = {{0.5}, {1.0}};
    sys.c = {{0.0, 1.0}};
    sys.w = CZono::interval(-1.0, 1.0);
    sys.v = CZono::interval(-1.0, 1.0);
    sys.x0_true = CZono::from_box({2.5, 2.5}, {0.5, 0.5});
    sys.finalize();
    return sys;
}

namespace {

StepRecord make_record(std::size_t trial, std::size_t k, const CZono& z, const Vec& x_true) {
    StepRecord r;
    r.trial = trial;
    r.k = k;
    r.ngen = z.num_generators();
    r.ncon = z.num_constraints();
    r.empty = is_empty(z);
    if (!r.empty) {
        const Box hull = interval_hull(z);
        r.diam_hull = hull.diameter();
        r.diam_inf = hull.diameter_inf();
        if (hull.bounded()) {
            const GapBound gap = gap_bound_to_state(hull, x_true);
            r.gap_bound = gap.bound;
        }
        r.contains = contains_point(z, x_true);
    }
    return r;
}

struct DemoFilters {
    std::vector<std::string> names;
    std::vector<std::vector<CZono>> estimates;  // per filter, per step
    std::map<std::string, TrialRecords> records;
};

DemoFilters run_demo_filters(const LinearSystem& sys, const Trajectory& traj,
                             std::size_t horizon, std::size_t delta_bar, double epsilon,
                             bool refine_carol) {
    DemoFilters out;
    out.names = {"alice", "bob", "carol"};
    out.estimates.resize(3);

    const CZono alice0 = CZono::from_box({2.0, 2.0}, {2.0, 2.0});   // [0,4]^2
    const CZono bob0 = CZono::from_box({0.0, 0.0}, {4.0, 4.0});     // [-4,4]^2
    const CZono carol0 = CZono::from_box({0.0, 0.0}, {1.0, 1.0});   // [-1,1]^2

    ClassicalSmfState alice = classical_init(alice0);
    ClassicalSmfState bob = classical_init(bob0);
    const ObservabilityDecomposition dec = decompose(sys.a, sys.b, sys.c);
    OitCzFilter carol(sys, dec, carol0, {delta_bar, epsilon, refine_carol});

    for (std::size_t k = 0; k <= horizon; ++k) {
        alice = classical_step(alice, traj.y[k], sys);
        bob = classical_step(bob, traj.y[k], sys);
        carol.step(traj.y[k]);
        out.estimates[0].push_back(alice.posterior);
        out.estimates[1].push_back(bob.posterior);
        out.estimates[2].push_back(carol.estimate());
        out.records["alice"].push_back(make_record(0, k, alice.posterior, traj.x[k]));
        out.records["bob"].push_back(make_record(0, k, bob.posterior, traj.x[k]));
        out.records["carol"].push_back(make_record(0, k, carol.estimate(), traj.x[k]));
    }
    return out;
}

void write_demo_outputs(const DemoConfig& config, const DemoFilters& filters,
                        const std::string& title) {
    if (config.out_dir.empty()) return;
    std::filesystem::create_directories(config.out_dir);
    std::vector<std::pair<std::string, Vec>> series;
    for (const auto& name : filters.names) {
        write_csv(config.out_dir + "/" + name + ".csv", filters.records.at(name));
        Vec diam;
        for (const StepRecord& r : filters.records.at(name)) diam.push_back(r.diam_hull);
        series.emplace_back(name, diam);
    }
    if (config.svg) {
        write_svg(config.out_dir + "/" + title + ".svg", title, series);
    }
}

double pairwise_gap(const DemoFilters& filters, std::size_t k, const DirectionGrid& grid) {
    double worst = 0.0;
    for (std::size_t i = 0; i < filters.estimates.size(); ++i) {
        for (std::size_t j = i + 1; j < filters.estimates.size(); ++j) {
            worst = std::max(
                worst, hausdorff_lower(filters.estimates[i][k], filters.estimates[j][k], grid));
        }
    }
    return worst;
}

}  // namespace

DemoSummary demo_observable(const DemoConfig& config) {
    const LinearSystem sys = demo_observable_system();
    const Trajectory traj = simulate(sys, config.horizon, config.seed);
    const std::size_t delta = 2;
    DemoFilters filters =
        run_demo_filters(sys, traj, config.horizon, delta, 0.01, /*refine_carol=*/false);

    DemoSummary summary;
    summary.per_filter = filters.records;
    const DirectionGrid grid = DirectionGrid::make(2, 720);
    std::vector<std::size_t> probes = config.probe_steps;
    if (probes.empty()) probes = {6};
    for (std::size_t k : probes) {
        if (k > config.horizon) continue;
        summary.pairwise_gap_at[k] = pairwise_gap(filters, k, grid);
        if (k >= delta) {
            const std::vector<Vec> window(traj.y.begin() + (k - delta), traj.y.begin() + k + 1);
            const OitSets oit = build_oit(sys, window, delta);
            double worst = 0.0;
            for (const auto& est : filters.estimates) {
                worst = std::max(worst, hausdorff_lower(est[k], oit.intersected, grid));
            }
            summary.oit_gap_at[k] = worst;
        }
    }
    write_demo_outputs(config, filters, "demo-observable");
    return summary;
}

DemoSummary demo_detectable(const DemoConfig& config) {
    const LinearSystem sys = demo_detectable_system();
    const Trajectory traj = simulate(sys, config.horizon, config.seed);
    DemoFilters filters =
        run_demo_filters(sys, traj, config.horizon, 4, 0.01, /*refine_carol=*/true);

    DemoSummary summary;
    summary.per_filter = filters.records;
    const DirectionGrid grid = DirectionGrid::make(2, 720);
    std::vector<std::size_t> probes = config.probe_steps;
    if (probes.empty()) probes = {0, std::min<std::size_t>(config.horizon, 30)};
    for (std::size_t k : probes) {
        if (k > config.horizon) continue;
        summary.pairwise_gap_at[k] = pairwise_gap(filters, k, grid);
    }
    write_demo_outputs(config, filters, "demo-detectable");
    return summary;
}

namespace {

struct TrialOutput {
    TrialRecords records;
    TrialSummary summary;
};

TrialOutput run_mc_trial(const MonteCarloConfig& config, std::size_t trial) {
    const std::uint64_t sys_seed = derive_seed(config.seed, 3 * trial);
    const std::uint64_t traj_seed = derive_seed(config.seed, 3 * trial + 1);
    const std::uint64_t guess_seed = derive_seed(config.seed, 3 * trial + 2);

    LinearSystem sys;
    std::size_t delta_bar;
    if (config.kind == SystemKind::observable) {
        sys = random_observable_system(sys_seed, config.n, config.p, config.m);
        delta_bar = config.n - rank(sys.c) + 3;
    } else {
        sys = random_detectable_system(sys_seed, config.n, config.n_o, config.p, config.m);
        delta_bar = config.n_o - rank(sys.c) + 3;
    }

    const Trajectory traj = simulate(sys, config.horizon, traj_seed);

    // initial guess: the true range shifted by a uniform offset in [-1,1]^n
    std::mt19937_64 grng(guess_seed);
    std::uniform_real_distribution<double> shift(-1.0, 1.0);
    Box guess_box = interval_hull(sys.x0_true);
    for (double& ci : guess_box.center) ci += shift(grng);
    const CZono guess = CZono::from_box(guess_box);

    const ObservabilityDecomposition dec = decompose(sys.a, sys.b, sys.c);
    OitCzFilter filter(sys, dec, guess, {delta_bar, config.epsilon, /*refine_prior=*/true});

    TrialOutput out;
    out.summary.trial = trial;
    out.summary.delta_bar = delta_bar;
    out.summary.all_nonempty = true;
    out.summary.contained_after_burn_in = true;

    double max_diam_mid = 0.0, max_diam_late = 0.0;
    for (std::size_t k = 0; k <= config.horizon; ++k) {
        filter.step(traj.y[k]);
        const CZono& z = filter.estimate();
        StepRecord r;
        r.trial = trial;
        r.k = k;
        r.ngen = z.num_generators();
        r.ncon = z.num_constraints();
        // with prior refinement on, the hull is already computed inside step()
        const auto& hull = filter.last_hull();
        r.empty = !hull.has_value();
        if (r.empty) {
            out.summary.all_nonempty = false;
        } else {
            r.diam_hull = hull->diameter();
            r.diam_inf = hull->diameter_inf();
            if (hull->bounded()) r.gap_bound = gap_bound_to_state(*hull, traj.x[k]).bound;
            r.contains = contains_point(z, traj.x[k]);
        }
        if (k >= 2 * delta_bar && !r.contains) out.summary.contained_after_burn_in = false;
        if (k >= 2 * delta_bar && k <= config.horizon / 2) {
            max_diam_mid = std::max(max_diam_mid, r.diam_hull);
        }
        if (k >= config.horizon / 2) max_diam_late = std::max(max_diam_late, r.diam_hull);
        out.records.push_back(r);
    }
    out.summary.max_diam_mid = max_diam_mid;
    out.summary.max_diam_late = max_diam_late;
    out.summary.diameter_ratio_ok = max_diam_late <= 1.1 * max_diam_mid;
    return out;
}

std::size_t resolve_threads(std::size_t requested, std::size_t trials) {
    std::size_t t = requested;
    if (t == 0) {
        if (const char* env = std::getenv("SMFKIT_THREADS")) {
            t = static_cast<std::size_t>(std::strtoul(env, nullptr, 10));
        }
    }
    if (t == 0) t = std::min<std::size_t>(std::thread::hardware_concurrency(), 8);
    if (t == 0) t = 1;
    return std::min(std::max<std::size_t>(t, 1), std::max<std::size_t>(trials, 1));
}

}  // namespace

MonteCarloResult montecarlo(const MonteCarloConfig& config) {
    const std::size_t threads = resolve_threads(config.threads, config.trials);
    std::vector<TrialOutput> outputs(config.trials);
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (;;) {
            const std::size_t trial = next.fetch_add(1);
            if (trial >= config.trials) return;
            try {
                outputs[trial] = run_mc_trial(config, trial);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);

    MonteCarloResult result;
    std::size_t passing = 0;
    for (const TrialOutput& o : outputs) {
        result.records.insert(result.records.end(), o.records.begin(), o.records.end());
        result.trials.push_back(o.summary);
        if (o.summary.all_nonempty && o.summary.contained_after_burn_in &&
            o.summary.diameter_ratio_ok) {
            ++passing;
        }
    }
    result.fraction_passing =
        config.trials == 0 ? 0.0 : static_cast<double>(passing) / config.trials;

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        write_csv(config.out_dir + "/montecarlo.csv", result.records);
        if (config.svg) {
            // mean hull diameter per step across trials
            Vec mean(config.horizon + 1, 0.0);
            for (const StepRecord& r : result.records) mean[r.k] += r.diam_hull;
            for (double& v : mean) v /= std::max<std::size_t>(config.trials, 1);
            write_svg(config.out_dir + "/montecarlo.svg", "mean hull diameter",
                      {{"mean_diam", mean}});
        }
    }
    return result;
}

TimingResult timing_bench(const TimingConfig& config) {
    const LinearSystem sys = random_observable_system(config.seed, config.n, config.p, config.m);
    const std::size_t delta_bar = config.n - rank(sys.c) + 3;
    const Trajectory traj = simulate(sys, config.horizon, derive_seed(config.seed, 1));
    const ObservabilityDecomposition dec = decompose(sys.a, sys.b, sys.c);

    TimingResult result;
    result.delta_bar = delta_bar;

    const Box guess_box = interval_hull(sys.x0_true);
    OitCzFilter filter(sys, dec, CZono::from_box(guess_box), {delta_bar, 0.001, true});
    TrialRecords oit_rows, cls_rows;
    for (std::size_t k = 0; k <= config.horizon; ++k) {
        const std::uint64_t t0 = now_ns();
        filter.step(traj.y[k]);
        const std::uint64_t dt = now_ns() - t0;
        result.oitcz_step_ns.push_back(static_cast<double>(dt));
        StepRecord r;
        r.k = k;
        r.time_ns = dt;
        r.ngen = filter.estimate().num_generators();
        r.ncon = filter.estimate().num_constraints();
        oit_rows.push_back(r);
    }

    ClassicalSmfState cls = classical_init(CZono::from_box(guess_box));
    for (std::size_t k = 0; k <= config.horizon; ++k) {
        const std::uint64_t t0 = now_ns();
        cls = classical_step(cls, traj.y[k], sys);
        const std::uint64_t dt = now_ns() - t0;
        result.classical_step_ns.push_back(static_cast<double>(dt));
        result.classical_ngen.push_back(cls.posterior.num_generators());
        result.classical_ncon.push_back(cls.posterior.num_constraints());
        StepRecord r;
        r.trial = 1;
        r.k = k;
        r.time_ns = dt;
        r.ngen = cls.posterior.num_generators();
        r.ncon = cls.posterior.num_constraints();
        cls_rows.push_back(r);
    }

    auto window_mean = [&](std::size_t lo, std::size_t hi) {
        double sum = 0.0;
        std::size_t cnt = 0;
        for (std::size_t k = lo; k <= hi && k < result.oitcz_step_ns.size(); ++k) {
            sum += result.oitcz_step_ns[k];
            ++cnt;
        }
        return cnt == 0 ? 0.0 : sum / static_cast<double>(cnt);
    };
    const double early = window_mean(delta_bar, delta_bar + 20);
    const double late = window_mean(config.horizon - 20, config.horizon);
    result.late_early_ratio = early > 0.0 ? late / early : 0.0;

    auto slope_of = [](const std::vector<std::size_t>& counts) -> long {
        if (counts.size() < 3) return -1;
        const long diff = static_cast<long>(counts[2]) - static_cast<long>(counts[1]);
        for (std::size_t k = 2; k + 1 < counts.size(); ++k) {
            if (static_cast<long>(counts[k + 1]) - static_cast<long>(counts[k]) != diff) {
                return -1;
            }
        }
        return diff;
    };
    result.ngen_slope = slope_of(result.classical_ngen);
    result.ncon_slope = slope_of(result.classical_ncon);

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        write_csv(config.out_dir + "/timing_oitcz.csv", oit_rows);
        write_csv(config.out_dir + "/timing_classical.csv", cls_rows);
    }
    return result;
}

}  // namespace smfkit

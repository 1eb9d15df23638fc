// Acceptance suite: one check per release criterion, each printed as a
// pass/fail line with its runtime. Exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rem/baseline.hpp"
#include "rem/regression.hpp"
#include "rem/simulation.hpp"
#include "rem/stats.hpp"
#include "oracles.hpp"

using namespace rem;

namespace {

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;   // 0 -> report time only
    std::function<void()> body;
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string g_note;  // optional detail printed under the criterion line

// ---- 1: hand-computed global weights on the four-unit design --------------

void check_global_weights() {
    const CovariateSample c({{2.0}, {4.0}, {6.0}, {8.0}});
    const auto w3 = global_weights(c, {3.0});
    const double expected[4] = {11.0 / 5.0, 7.0 / 5.0, 3.0 / 5.0, -1.0 / 5.0};
    for (int i = 0; i < 4; ++i) {
        require(std::abs(w3[i] - expected[i]) <= 1e-12,
                "weight " + std::to_string(i) + " = " + fmt(w3[i]) + ", expected " +
                    fmt(expected[i]));
    }
    const auto w5 = global_weights(c, {5.0});
    for (double w : w5) require(w == 1.0, "weight at the mean is " + fmt(w) + ", expected 1");
}

// ---- 2: prediction at the covariate mean is the barycenter, exactly -------

void check_barycenter_consistency() {
    std::mt19937_64 eng(2718);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<EmpiricalMeasure> measures;
    const int sizes[4] = {1, 2, 5, 10};
    for (int i = 0; i < 4; ++i) {
        std::vector<double> obs(static_cast<std::size_t>(sizes[i]));
        for (double& y : obs) y = 2.0 * (i + 1) * nd(eng);
        measures.emplace_back(std::move(obs));
    }
    const RemModel model = fit(std::vector<double>{2.0, 4.0, 6.0, 8.0}, measures);
    const auto mean = model.regressor().covariates().mean();
    const Prediction pred = model.predict(mean);
    const QuantileGrid bary = barycenter(measures, 5000);
    const double d = wasserstein_distance(pred.quantiles, bary);
    require(d == 0.0, "distance between mean prediction and barycenter is " + fmt(d));
}

// ---- 3: projection against the exhaustive QP oracle ------------------------

void check_projection_oracle() {
    std::mt19937_64 eng(31337);
    std::uniform_real_distribution<double> uval(-5.0, 5.0);
    std::uniform_real_distribution<double> ulo(-6.0, -0.5);
    std::uniform_real_distribution<double> uhi(0.5, 6.0);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<double> v(1 + eng() % 8);
        for (double& x : v) x = uval(eng);
        std::optional<DomainInterval> domain;
        std::optional<std::pair<double, double>> box;
        if (eng() % 2 == 0) {
            const double lo = ulo(eng);
            const double hi = uhi(eng);
            domain = DomainInterval(lo, hi);
            box = {{lo, hi}};
        }
        const auto ours = project_to_wasserstein(v, domain).values();
        const auto oracle_sol = oracle::project_enumerate(v, box);
        for (std::size_t i = 0; i < v.size(); ++i) {
            worst = std::max(worst, std::abs(ours[i] - oracle_sol[i]));
        }
        const auto again = project_to_wasserstein(ours, domain).values();
        require(again == ours, "projection is not exactly idempotent");
    }
    require(worst <= 1e-8, "max deviation from the QP oracle is " + fmt(worst));
}

// ---- 4: metric axioms on random empirical-measure triples ------------------

void check_metric_properties() {
    std::mt19937_64 eng(4242);
    std::uniform_real_distribution<double> uval(-5.0, 5.0);
    for (int rep = 0; rep < 500; ++rep) {
        std::vector<int> sizes(3);
        std::vector<QuantileGrid> q;
        std::vector<std::vector<double>> raw(3);
        for (int j = 0; j < 3; ++j) {
            sizes[j] = 1 + static_cast<int>(eng() % 20);
            raw[j].resize(static_cast<std::size_t>(sizes[j]));
            for (double& x : raw[j]) x = uval(eng);
        }
        const int m = lcm_grid(sizes, 5000);
        for (int j = 0; j < 3; ++j) {
            q.push_back(empirical_quantile(EmpiricalMeasure(raw[j]), m));
        }
        require(wasserstein_distance(q[0], q[0]) == 0.0, "d(a,a) != 0");
        require(wasserstein_distance(q[0], q[1]) == wasserstein_distance(q[1], q[0]),
                "symmetry violated");
        const double ab = wasserstein_distance(q[0], q[1]);
        const double bc = wasserstein_distance(q[1], q[2]);
        const double ac = wasserstein_distance(q[0], q[2]);
        require(ac <= ab + bc + 1e-12,
                "triangle inequality violated by " + fmt(ac - ab - bc));
    }
}

// ---- 5 & 6: ordinal benchmark and empirical convergence rate ---------------

struct BenchmarkOutputs {
    StudyResult with_baseline;   // ladder {50, 100, 200}, both methods
    StudyResult tail;            // ladder {500}, regression only
};

BenchmarkOutputs run_benchmark() {
    SimulationScenario sc;
    sc.setting = Setting::I;
    sc.runs = 200;
    sc.master_seed = 20240915;
    sc.workers = 0;
    BenchmarkOutputs out;
    out.with_baseline = run_study(sc, {50, 100, 200});
    sc.include_two_step = false;
    out.tail = run_study(sc, {500});
    return out;
}

void check_benchmark_ordering(const BenchmarkOutputs& bench) {
    const auto& ladder = bench.with_baseline.ladder;
    require(ladder.size() == 3, "expected three ladder points");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        require(ladder[i].rem.runs > 0, "no successful runs");
        require(ladder[i].two_step.has_value() && ladder[i].two_step->runs > 0,
                "no baseline runs");
        if (i > 0) {
            require(ladder[i].rem.median < ladder[i - 1].rem.median,
                    "median ISE not decreasing: " + fmt(ladder[i - 1].rem.median) + " -> " +
                        fmt(ladder[i].rem.median) + " at n=" + std::to_string(ladder[i].n));
        }
        require(ladder[i].rem.median < ladder[i].two_step->median,
                "median ISE " + fmt(ladder[i].rem.median) + " not below baseline " +
                    fmt(ladder[i].two_step->median) + " at n=" + std::to_string(ladder[i].n));
    }
}

void check_convergence_rate(const BenchmarkOutputs& bench) {
    std::vector<double> ns;
    std::vector<double> means;
    for (const auto& point : bench.with_baseline.ladder) {
        ns.push_back(static_cast<double>(point.n));
        means.push_back(point.rem.mean);
    }
    for (const auto& point : bench.tail.ladder) {
        ns.push_back(static_cast<double>(point.n));
        means.push_back(point.rem.mean);
    }
    require(ns.size() == 4, "expected a four-point ladder");
    const double slope = stats::loglog_slope(ns, means);
    require(slope >= -1.35 && slope <= -0.65,
            "log-log ISE slope " + fmt(slope) + " outside [-1.35, -0.65]");
    g_note = "slope " + fmt(slope) + " over n = 50..500";
}

// ---- 7: local beats global on the nonlinear setting -------------------------

void check_local_beats_global() {
    SimulationScenario sc;
    sc.setting = Setting::II;
    sc.n = 200;
    sc.runs = 100;
    sc.master_seed = 555;
    sc.include_two_step = false;

    const StudyResult local_study = run_study(sc, {200});
    sc.mode_override = Mode::global;
    const StudyResult global_study = run_study(sc, {200});

    const double local_median = local_study.ladder[0].rem.median;
    const double global_median = global_study.ladder[0].rem.median;
    require(local_median < global_median,
            "local median " + fmt(local_median) + " not below global " + fmt(global_median));
    g_note = "median ISE local " + fmt(local_median) + " vs global " + fmt(global_median);
}

// ---- 8: transport construction -------------------------------------------

void check_transport_construction() {
    for (int i = 0; i < 1000; ++i) {
        const double a = -4.0 + 8.0 * i / 999.0;
        const double pair1 = TransportMap(1)(a) + TransportMap(-1)(a);
        const double pair2 = TransportMap(2)(a) + TransportMap(-2)(a);
        const double avg = 0.25 * (pair1 + pair2);
        require(std::abs(avg - a) <= 1e-15,
                "transport average off by " + fmt(avg - a) + " at alpha=" + fmt(a));
    }
    const SettingParams p{};
    for (int k = 0; k < 20; ++k) {
        const double z = -0.95 + 1.9 * k / 19.0;
        const double d = wasserstein_distance(true_quantile(Setting::III, p, z, 500),
                                              true_quantile(Setting::I, p, z, 500));
        require(d == 0.0, "transported target differs from untransported at z=" + fmt(z));
    }
}

// ---- 9: sparse-unit recovery ----------------------------------------------

void check_sparse_unit_recovery() {
    SimulationScenario sc;
    sc.setting = Setting::I;
    sc.master_seed = 99;
    const int n = 200;
    RunData data = generate_run_data(sc, n, 0);
    data.units[0].observations.resize(1);  // force a single observation
    data.units[0].latent.n_obs = 1;

    std::vector<double> z;
    std::vector<EmpiricalMeasure> measures;
    for (int i = 0; i < n; ++i) {
        if (data.units[i].observations.empty()) continue;
        z.push_back(data.z[i]);
        measures.emplace_back(data.units[i].observations);
    }
    const double sparse_z = data.z[0];
    const RemModel model = fit(z, measures);
    const Prediction pred = model.predict(sparse_z);
    const QuantileGrid truth =
        true_quantile(Setting::I, sc.params, sparse_z, model.grid_size());
    const double d = wasserstein_distance(pred.quantiles, truth);
    require(d < 0.5, "sparse-unit prediction error " + fmt(d) + " not below 0.5");
    g_note = "distance to truth " + fmt(d) + " with one observation";

    bool infeasible_thrown = false;
    try {
        (void)kde_quantile(measures[0], KdeConfig{}, 100);
    } catch (const InfeasibleUnitError&) {
        infeasible_thrown = true;
    }
    require(infeasible_thrown, "presmoothing accepted a single-observation unit");
    const TwoStepModel two_step = fit_two_step(z, measures, KdeConfig{});
    require(two_step.excluded_units() == 1 && two_step.excluded_indices()[0] == 0,
            "baseline did not mark the sparse unit infeasible");
}

// ---- 10: simulate determinism across worker counts -------------------------

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void check_simulate_determinism() {
    const auto base = std::filesystem::temp_directory_path() / "rem_acceptance_sim";
    std::filesystem::remove_all(base);
    const auto dir1 = base / "w1";
    const auto dir2 = base / "w3";
    const std::string common = std::string(REM_CLI_PATH) +
                               " simulate --setting I --n-ladder 40 --runs 12 --seed 321";
    const std::string cmd1 = common + " --workers 1 --out-dir " + dir1.string();
    const std::string cmd2 = common + " --workers 3 --out-dir " + dir2.string();
    require(std::system(cmd1.c_str()) == 0, "simulate (1 worker) failed");
    require(std::system(cmd2.c_str()) == 0, "simulate (3 workers) failed");
    for (const char* name : {"runs.jsonl", "summary.json", "summary.csv"}) {
        const std::string a = slurp(dir1 / name);
        const std::string b = slurp(dir2 / name);
        require(!a.empty(), std::string(name) + " is empty");
        require(a == b, std::string(name) + " differs across worker counts");
    }
}

}  // namespace

int main() {
    BenchmarkOutputs bench;

    const std::vector<Criterion> criteria = {
        {1, "global weights on the four-unit design", 1.0, check_global_weights},
        {2, "prediction at the covariate mean equals the barycenter", 1.0,
         check_barycenter_consistency},
        {3, "monotone projection matches the exhaustive QP oracle", 30.0,
         check_projection_oracle},
        {4, "metric axioms on random empirical-measure triples", 30.0, check_metric_properties},
        {5, "median ISE decreases in n and beats the two-step baseline", 0.0,
         [&] {
             bench = run_benchmark();
             check_benchmark_ordering(bench);
         }},
        {6, "mean ISE follows the n^-1 convergence rate", 0.0,
         [&] { check_convergence_rate(bench); }},
        {7, "local regression beats global on the nonlinear setting", 0.0,
         check_local_beats_global},
        {8, "transport maps average to the identity and preserve the target", 5.0,
         check_transport_construction},
        {9, "a single-observation unit is recovered; baseline marks it infeasible", 120.0,
         check_sparse_unit_recovery},
        {10, "simulate output is byte-identical across worker counts", 120.0,
         check_simulate_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string error;
        g_note.clear();
        try {
            c.body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool ok = error.empty();
        if (ok && c.time_limit_s > 0.0 && elapsed > c.time_limit_s) {
            error = "exceeded the " + fmt(c.time_limit_s) + " s time limit";
            ok = false;
        }
        std::printf("%s %2d | %-62s | %8.2f s%s%s\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    elapsed, error.empty() ? "" : " | ", error.c_str());
        if (!g_note.empty()) std::printf("        (%s)\n", g_note.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
    } else {
        std::printf("all criteria passed\n");
    }
    return failures;
}

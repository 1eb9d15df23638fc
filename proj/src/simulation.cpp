#include "rem/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "rem/stats.hpp"

namespace rem {

Setting parse_setting(const std::string& s) {
    if (s == "I" || s == "1") return Setting::I;
    if (s == "II" || s == "2") return Setting::II;
    if (s == "III" || s == "3") return Setting::III;
    if (s == "IV" || s == "4") return Setting::IV;
    throw InvalidArgumentError("unknown setting '" + s + "'; expected I, II, III or IV");
}

std::string setting_name(Setting s) {
    switch (s) {
        case Setting::I: return "I";
        case Setting::II: return "II";
        case Setting::III: return "III";
        case Setting::IV: return "IV";
    }
    return "?";
}

bool is_local_setting(Setting s) { return s == Setting::II || s == Setting::IV; }

namespace {
bool is_transported(Setting s) { return s == Setting::III || s == Setting::IV; }
}  // namespace

std::vector<double> QueryGrid::midpoints() const {
    if (points < 1 || !(hi > lo)) {
        throw InvalidArgumentError("QueryGrid: needs hi > lo and at least one point");
    }
    std::vector<double> mids(static_cast<std::size_t>(points));
    const double w = cell_width();
    for (int i = 0; i < points; ++i) {
        mids[i] = lo + (static_cast<double>(i) + 0.5) * w;
    }
    return mids;
}

TransportMap::TransportMap(int k_) : k(k_) {
    if (k != -2 && k != -1 && k != 1 && k != 2) {
        throw InvalidArgumentError("TransportMap: k must be one of {-2, -1, 1, 2}");
    }
}

double TransportMap::operator()(double a) const {
    return a - std::sin(static_cast<double>(k) * a) / std::abs(static_cast<double>(k));
}

double setting_link(Setting s, double z) {
    return is_local_setting(s) ? std::sin(M_PI * z) : z;
}

double true_mean(Setting s, const SettingParams& p, double z) {
    return p.eta0 + p.alpha * setting_link(s, z);
}

double true_sd(Setting s, const SettingParams& p, double z) {
    return p.sigma0 + p.beta * setting_link(s, z);
}

namespace detail {

std::vector<double> standard_normal_grid(int grid_size) {
    std::vector<double> g(static_cast<std::size_t>(grid_size));
    for (int m = 0; m < grid_size; ++m) {
        g[m] = stats::normal_quantile((static_cast<double>(m) + 0.5) /
                                      static_cast<double>(grid_size));
    }
    return g;
}

double ise_core(const std::vector<QuantileGrid>& fitted, const std::vector<QuantileGrid>& truth,
                double cell_width) {
    if (fitted.size() != truth.size()) {
        throw InvalidArgumentError("ise: fitted and truth grids must match the query grid");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < fitted.size(); ++i) {
        const double d = wasserstein_distance(fitted[i], truth[i]);
        acc += d * d * cell_width;
    }
    return acc;
}

}  // namespace detail

QuantileGrid true_quantile(Setting s, const SettingParams& p, double z, int grid_size) {
    const double mu = true_mean(s, p, z);
    const double sd = true_sd(s, p, z);
    if (!(sd > 0.0)) {
        throw InvalidArgumentError("true_quantile: nonpositive sd at z = " + std::to_string(z));
    }
    const std::vector<double> base = detail::standard_normal_grid(grid_size);
    std::vector<double> q(base.size());
    for (std::size_t m = 0; m < base.size(); ++m) q[m] = mu + sd * base[m];
    return QuantileGrid(std::move(q));
}

SampledUnit sample_unit(Setting s, const SettingParams& p, double z, double lambda,
                        rng::Engine& eng) {
    const double loc = true_mean(s, p, z);
    const double scale_mean = true_sd(s, p, z);
    if (!(scale_mean > 0.0)) {
        throw InvalidArgumentError("sample_unit: sigma0 + beta*g(z) must stay positive");
    }

    SampledUnit unit;
    unit.latent.eta = p.tau > 0.0 ? rng::normal(eng, loc, p.tau) : loc;
    unit.latent.sigma =
        rng::gamma(eng, scale_mean * scale_mean / p.kappa, p.kappa / scale_mean);
    unit.latent.n_obs = rng::poisson(eng, lambda);

    if (is_transported(s)) {
        static constexpr int kChoices[4] = {-2, -1, 1, 2};
        const std::uint64_t pick = eng() % 4;
        unit.latent.transport_k = kChoices[pick];
    }

    unit.observations.reserve(static_cast<std::size_t>(unit.latent.n_obs));
    for (long j = 0; j < unit.latent.n_obs; ++j) {
        // Quantile pushforward: the transported response is T applied to the
        // Gaussian quantile at a uniform draw.
        double y = unit.latent.eta +
                   unit.latent.sigma * stats::normal_quantile(rng::uniform01(eng));
        if (unit.latent.transport_k != 0) {
            y = TransportMap(unit.latent.transport_k)(y);
        }
        unit.observations.push_back(y);
    }
    return unit;
}

double ise(const std::function<QuantileGrid(double)>& fitted,
           const std::function<QuantileGrid(double)>& truth, const QueryGrid& grid) {
    const auto mids = grid.midpoints();
    std::vector<QuantileGrid> f;
    std::vector<QuantileGrid> t;
    f.reserve(mids.size());
    t.reserve(mids.size());
    for (double z : mids) {
        f.push_back(fitted(z));
        t.push_back(truth(z));
    }
    return detail::ise_core(f, t, grid.cell_width());
}

RunData generate_run_data(const SimulationScenario& sc, int n, int run_index) {
    if (n < 2) throw InvalidArgumentError("generate_run_data: n must be >= 2");
    rng::Engine eng = rng::make_engine(sc.master_seed, static_cast<std::uint64_t>(n),
                                       static_cast<std::uint64_t>(run_index));
    RunData data;
    data.z.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) data.z[i] = -1.0 + 2.0 * rng::uniform01(eng);
    const double lambda = sc.lambda_rate * static_cast<double>(n);
    data.units.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double unit_lambda = lambda;
        if (!sc.unit_rate_multipliers.empty()) {
            unit_lambda *= sc.unit_rate_multipliers[static_cast<std::size_t>(i) %
                                                    sc.unit_rate_multipliers.size()];
        }
        data.units.push_back(sample_unit(sc.setting, sc.params, data.z[i], unit_lambda, eng));
    }
    return data;
}

namespace {

struct PreparedTruth {
    int grid_size = 0;
    std::vector<double> base;  // standard normal quantiles at midpoints

    QuantileGrid at(Setting s, const SettingParams& p, double z) {
        const double mu = true_mean(s, p, z);
        const double sd = true_sd(s, p, z);
        std::vector<double> q(base.size());
        for (std::size_t m = 0; m < base.size(); ++m) q[m] = mu + sd * base[m];
        return QuantileGrid(std::move(q));
    }
};

double score_method(const SimulationScenario& sc, const FrechetRegressor& reg,
                    const std::vector<double>& mids) {
    const auto outcomes = reg.predict_batch(mids);
    std::vector<QuantileGrid> fitted;
    fitted.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        if (!o.ok()) throw Error(o.error_code, o.error_message);
        fitted.push_back(o.prediction->quantiles);
    }
    PreparedTruth truth{reg.grid_size(), detail::standard_normal_grid(reg.grid_size())};
    std::vector<QuantileGrid> t;
    t.reserve(mids.size());
    for (double z : mids) t.push_back(truth.at(sc.setting, sc.params, z));
    return detail::ise_core(fitted, t, sc.query_grid.cell_width());
}

}  // namespace

RunResult evaluate_run(const SimulationScenario& sc, int n, int run_index, const RunData& data) {
    RunResult result;
    result.run_index = run_index;
    result.n = n;
    result.setting = sc.setting;

    std::vector<double> z;
    std::vector<EmpiricalMeasure> measures;
    z.reserve(data.units.size());
    measures.reserve(data.units.size());
    for (std::size_t i = 0; i < data.units.size(); ++i) {
        if (data.units[i].observations.empty()) {
            ++result.excluded_units;
            continue;
        }
        z.push_back(data.z[i]);
        measures.emplace_back(data.units[i].observations);
    }

    RemConfig cfg;
    cfg.mode = sc.mode_override.value_or(is_local_setting(sc.setting) ? Mode::local
                                                                      : Mode::global);
    cfg.grid_cap = sc.grid_cap;
    const auto mids = sc.query_grid.midpoints();

    try {
        const RemModel model = fit(z, measures, cfg);
        result.ise_rem = score_method(sc, model.regressor(), mids);
    } catch (const Error& e) {
        result.error = std::string(e.code()) + ": " + e.what();
        return result;
    }

    if (sc.include_two_step) {
        try {
            const TwoStepModel model = fit_two_step(z, measures, sc.kde, cfg);
            result.two_step_excluded = model.excluded_units();
            result.ise_two_step = score_method(sc, model.regressor(), mids);
        } catch (const Error&) {
            result.two_step_infeasible = true;
        }
    }
    return result;
}

namespace {

MethodSummary summarize(std::vector<double> values) {
    MethodSummary s;
    s.runs = static_cast<int>(values.size());
    if (values.empty()) return s;
    s.mean = stats::mean(values);
    std::sort(values.begin(), values.end());
    s.median = stats::quantile_sorted(values, 0.5);
    s.q1 = stats::quantile_sorted(values, 0.25);
    s.q3 = stats::quantile_sorted(values, 0.75);
    return s;
}

}  // namespace

StudyResult run_study(const SimulationScenario& sc, const std::vector<int>& n_ladder) {
    if (n_ladder.empty()) throw InvalidArgumentError("run_study: empty n ladder");
    if (sc.runs < 1) throw InvalidArgumentError("run_study: need at least one run");

    const int ladder_size = static_cast<int>(n_ladder.size());
    const int total = ladder_size * sc.runs;
    StudyResult study;
    study.runs.resize(static_cast<std::size_t>(total));

    int workers = sc.workers > 0 ? sc.workers
                                 : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, total);

    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int task = next.fetch_add(1);
            if (task >= total) return;
            const int li = task / sc.runs;
            const int q = task % sc.runs;
            const int n = n_ladder[static_cast<std::size_t>(li)];
            RunResult r;
            try {
                const RunData data = generate_run_data(sc, n, q);
                r = evaluate_run(sc, n, q, data);
            } catch (const Error& e) {
                r.run_index = q;
                r.n = n;
                r.setting = sc.setting;
                r.error = std::string(e.code()) + ": " + e.what();
            }
            study.runs[static_cast<std::size_t>(task)] = std::move(r);
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    int failures = 0;
    for (const auto& r : study.runs) {
        if (r.failed()) ++failures;
    }
    if (failures * 10 > total) {
        std::string detail;
        for (const auto& r : study.runs) {
            if (r.failed() && detail.size() < 500) {
                detail += " [n=" + std::to_string(r.n) + " run=" + std::to_string(r.run_index) +
                          ": " + r.error + "]";
            }
        }
        throw StudyError("more than 10% of runs failed (" + std::to_string(failures) + "/" +
                         std::to_string(total) + ");" + detail);
    }

    std::vector<double> ladder_n;
    std::vector<double> ladder_mean_ise;
    for (int li = 0; li < ladder_size; ++li) {
        LadderPoint point;
        point.n = n_ladder[static_cast<std::size_t>(li)];
        std::vector<double> rem_values;
        std::vector<double> two_step_values;
        for (int q = 0; q < sc.runs; ++q) {
            const auto& r = study.runs[static_cast<std::size_t>(li * sc.runs + q)];
            if (r.failed()) {
                ++point.failures;
                continue;
            }
            if (r.ise_rem) rem_values.push_back(*r.ise_rem);
            if (r.ise_two_step) two_step_values.push_back(*r.ise_two_step);
        }
        point.rem = summarize(rem_values);
        if (sc.include_two_step) point.two_step = summarize(std::move(two_step_values));
        if (point.rem.runs > 0) {
            ladder_n.push_back(static_cast<double>(point.n));
            ladder_mean_ise.push_back(point.rem.mean);
        }
        study.ladder.push_back(std::move(point));
    }

    if (ladder_n.size() >= 2) {
        study.rem_rate_slope = stats::loglog_slope(ladder_n, ladder_mean_ise);
    }
    return study;
}

}  // namespace rem

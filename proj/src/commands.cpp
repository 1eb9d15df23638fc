#include "rem/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "rem/baseline.hpp"
#include "rem/dataset.hpp"
#include "rem/log.hpp"
#include "rem/output.hpp"
#include "rem/regression.hpp"
#include "rem/simulation.hpp"

namespace rem {

namespace {

void report_error(const Error& e) {
    nlohmann::ordered_json j;
    j["error"] = {{"code", e.code()}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
}

KernelFamily parse_kernel(const std::string& name) {
    if (name == "epanechnikov") return KernelFamily::epanechnikov;
    if (name == "triangular") return KernelFamily::triangular;
    if (name == "quartic") return KernelFamily::quartic;
    throw InvalidArgumentError("unknown kernel '" + name +
                               "'; expected epanechnikov, triangular or quartic");
}

std::vector<double> parse_vector(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw InvalidArgumentError("cannot parse number '" + item + "' in query list");
        }
    }
    return out;
}

// Inline list ("3,5" or "0.1,0.2;0.3,0.4" for vector queries) or a file with
// one query per line.
std::vector<std::vector<double>> parse_queries(const std::string& text, int p) {
    if (text.empty()) throw InvalidArgumentError("no queries given");
    std::vector<std::string> chunks;
    if (std::filesystem::exists(text) && std::filesystem::is_regular_file(text)) {
        std::ifstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r\n") != std::string::npos) chunks.push_back(line);
        }
    } else if (p == 1) {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) chunks.push_back(item);
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ';')) chunks.push_back(item);
    }

    std::vector<std::vector<double>> queries;
    for (const auto& chunk : chunks) {
        auto q = parse_vector(chunk);
        if (q.empty()) continue;
        if (static_cast<int>(q.size()) != p) {
            throw InvalidArgumentError("query '" + chunk + "' has dimension " +
                                       std::to_string(q.size()) + ", design has p = " +
                                       std::to_string(p));
        }
        queries.push_back(std::move(q));
    }
    if (queries.empty()) throw InvalidArgumentError("query list is empty");
    return queries;
}

void write_output(const std::string& path, const std::string& format,
                  const std::vector<OutputRecord>& records) {
    std::ostringstream body;
    if (format == "json") {
        write_records_json(body, records);
    } else if (format == "csv") {
        write_records_csv(body, records);
    } else {
        throw InvalidArgumentError("unknown format '" + format + "'; expected json or csv");
    }
    if (path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("E_IO", "cannot write output file '" + path + "'");
        out << body.str();
    }
}

OutputRecord make_record(const Prediction& pred, const std::string& method, int excluded,
                         std::vector<std::string> warnings, bool density,
                         double density_bandwidth, int density_points) {
    OutputRecord rec;
    rec.query = pred.z;
    rec.method = method;
    rec.grid_size = pred.quantiles.grid_size();
    rec.quantiles = pred.quantiles.values();
    rec.diagnostics.weight_min = *std::min_element(pred.weights.begin(), pred.weights.end());
    rec.diagnostics.weight_max = *std::max_element(pred.weights.begin(), pred.weights.end());
    rec.diagnostics.excluded_units = excluded;
    rec.diagnostics.extrapolation = pred.extrapolation;
    rec.diagnostics.warnings = std::move(warnings);
    if (pred.extrapolation) {
        rec.diagnostics.warnings.push_back(log::w_extrapolation);
        log::warn(log::w_extrapolation,
                  "some weights exceed 10 in magnitude; the query extrapolates the design");
    }
    if (density) {
        const double bw = density_bandwidth > 0.0 ? density_bandwidth
                                                  : default_density_bandwidth(pred.quantiles);
        rec.density = quantile_to_density(pred.quantiles, bw, density_points);
    }
    return rec;
}

}  // namespace

int cmd_fit_predict(const FitPredictOptions& opt) {
    try {
        const LongFormatDataset ds = ingest(opt.observations_path, opt.units_path);
        const auto queries = parse_queries(opt.queries, ds.p());

        RemConfig cfg;
        cfg.bandwidth = opt.bandwidth;
        cfg.kernel = KernelSpec{parse_kernel(opt.kernel)};
        cfg.grid_cap = opt.grid_cap;
        cfg.domain = opt.domain;

        std::string method_tag;
        std::vector<PredictionOutcome> outcomes;
        int method_excluded = 0;
        if (opt.method == "global" || opt.method == "local") {
            cfg.mode = opt.method == "local" ? Mode::local : Mode::global;
            const RemModel model = fit(ds.covariates, ds.measures, cfg);
            outcomes = model.predict_batch(queries);
            method_tag = cfg.mode == Mode::local ? "rem-local" : "rem-global";
        } else if (opt.method == "two-step") {
            cfg.mode = ds.p() == 1 ? cfg.mode : Mode::global;
            const TwoStepModel model = fit_two_step(ds.covariates, ds.measures, KdeConfig{}, cfg);
            method_excluded = model.excluded_units();
            outcomes = model.predict_batch(queries);
            method_tag = "two-step";
        } else {
            throw InvalidArgumentError("unknown method '" + opt.method +
                                       "'; expected global, local or two-step");
        }

        std::vector<std::string> base_warnings;
        for (std::size_t i = 0; i < ds.excluded_units.size(); ++i) {
            base_warnings.push_back(log::w_empty_unit);
        }
        if (method_excluded > 0) base_warnings.push_back(log::w_two_step_excluded);

        std::vector<OutputRecord> records;
        std::string failures;
        for (const auto& o : outcomes) {
            if (!o.ok()) {
                failures += " [" + o.error_code + ": " + o.error_message + "]";
                continue;
            }
            records.push_back(make_record(
                *o.prediction, method_tag,
                static_cast<int>(ds.excluded_units.size()) + method_excluded, base_warnings,
                opt.density, opt.density_bandwidth, opt.density_points));
        }
        if (!failures.empty()) {
            throw Error("E_PREDICTION", "some queries failed:" + failures);
        }
        write_output(opt.out, opt.format, records);
        return 0;
    } catch (const Error& e) {
        report_error(e);
        return 1;
    }
}

int cmd_barycenter(const BarycenterOptions& opt) {
    try {
        const LongFormatDataset ds = ingest(opt.observations_path, opt.units_path);
        const QuantileGrid grid = [&] {
            if (opt.domain) {
                // Re-project (a no-op for monotonicity) to apply the box.
                return project_to_wasserstein(barycenter(ds.measures, opt.grid_cap).values(),
                                              opt.domain);
            }
            return barycenter(ds.measures, opt.grid_cap);
        }();

        // The equal-weight barycenter coincides with the global fit at the
        // covariate mean.
        std::vector<double> zbar(static_cast<std::size_t>(ds.p()), 0.0);
        for (const auto& row : ds.covariates) {
            for (std::size_t j = 0; j < row.size(); ++j) zbar[j] += row[j];
        }
        for (double& v : zbar) v /= static_cast<double>(ds.n());

        Prediction pred{zbar, grid, std::vector<double>(ds.measures.size(), 1.0), false};
        std::vector<std::string> warnings;
        for (std::size_t i = 0; i < ds.excluded_units.size(); ++i) {
            warnings.push_back(log::w_empty_unit);
        }
        std::vector<OutputRecord> records{
            make_record(pred, "rem-global", static_cast<int>(ds.excluded_units.size()),
                        std::move(warnings), opt.density, opt.density_bandwidth,
                        opt.density_points)};
        write_output(opt.out, opt.format, records);
        return 0;
    } catch (const Error& e) {
        report_error(e);
        return 1;
    }
}

namespace {

nlohmann::ordered_json run_to_json(const RunResult& r) {
    nlohmann::ordered_json j;
    j["run"] = r.run_index;
    j["n"] = r.n;
    j["setting"] = setting_name(r.setting);
    j["ise_rem"] = r.ise_rem ? nlohmann::ordered_json(*r.ise_rem) : nullptr;
    j["ise_two_step"] = r.ise_two_step ? nlohmann::ordered_json(*r.ise_two_step) : nullptr;
    j["two_step_infeasible"] = r.two_step_infeasible;
    j["excluded_units"] = r.excluded_units;
    j["two_step_excluded"] = r.two_step_excluded;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

nlohmann::ordered_json summary_to_json(const MethodSummary& s) {
    return {{"runs", s.runs}, {"mean", s.mean}, {"median", s.median}, {"q1", s.q1},
            {"q3", s.q3}};
}

}  // namespace

int cmd_simulate(const SimulateOptions& opt) {
    try {
        SimulationScenario sc;
        sc.setting = parse_setting(opt.setting);
        sc.lambda_rate = opt.lambda_rate;
        sc.runs = opt.runs;
        sc.master_seed = opt.seed;
        sc.grid_cap = opt.grid_cap;
        sc.query_grid.points = opt.query_points;
        sc.workers = opt.workers;
        sc.include_two_step = opt.include_two_step;
        if (opt.n_ladder.empty()) throw InvalidArgumentError("simulate: empty n ladder");

        const StudyResult study = run_study(sc, opt.n_ladder);

        std::filesystem::create_directories(opt.out_dir);
        const std::filesystem::path dir(opt.out_dir);

        {
            std::ofstream runs(dir / "runs.jsonl", std::ios::binary);
            if (!runs) throw Error("E_IO", "cannot write runs.jsonl");
            for (const auto& r : study.runs) runs << run_to_json(r).dump() << "\n";
        }
        {
            nlohmann::ordered_json j;
            j["setting"] = setting_name(sc.setting);
            j["runs"] = sc.runs;
            j["seed"] = sc.master_seed;
            j["lambda_rate"] = sc.lambda_rate;
            j["query_points"] = sc.query_grid.points;
            j["ladder"] = nlohmann::ordered_json::array();
            for (const auto& point : study.ladder) {
                nlohmann::ordered_json pj;
                pj["n"] = point.n;
                pj["rem"] = summary_to_json(point.rem);
                pj["two_step"] =
                    point.two_step ? summary_to_json(*point.two_step) : nlohmann::ordered_json();
                pj["failures"] = point.failures;
                j["ladder"].push_back(pj);
            }
            j["rem_rate_slope"] = study.rem_rate_slope
                                      ? nlohmann::ordered_json(*study.rem_rate_slope)
                                      : nullptr;
            std::ofstream summary(dir / "summary.json", std::ios::binary);
            if (!summary) throw Error("E_IO", "cannot write summary.json");
            summary << j.dump(2) << "\n";
        }
        {
            std::ofstream csv(dir / "summary.csv", std::ios::binary);
            if (!csv) throw Error("E_IO", "cannot write summary.csv");
            csv << "n,method,runs,mean,median,q1,q3\n";
            for (const auto& point : study.ladder) {
                csv << point.n << ",rem," << point.rem.runs << ',' << format_double(point.rem.mean)
                    << ',' << format_double(point.rem.median) << ','
                    << format_double(point.rem.q1) << ',' << format_double(point.rem.q3) << '\n';
                if (point.two_step) {
                    csv << point.n << ",two-step," << point.two_step->runs << ','
                        << format_double(point.two_step->mean) << ','
                        << format_double(point.two_step->median) << ','
                        << format_double(point.two_step->q1) << ','
                        << format_double(point.two_step->q3) << '\n';
                }
            }
        }
        return 0;
    } catch (const Error& e) {
        report_error(e);
        return 1;
    }
}

}  // namespace rem

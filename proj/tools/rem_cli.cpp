#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rem/commands.hpp"
#include "rem/errors.hpp"

namespace {

std::optional<rem::DomainInterval> parse_domain(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw rem::InvalidArgumentError("--domain expects 'lo,hi'");
    }
    try {
        const double lo = std::stod(text.substr(0, comma));
        const double hi = std::stod(text.substr(comma + 1));
        return rem::DomainInterval(lo, hi);
    } catch (const std::invalid_argument&) {
        throw rem::InvalidArgumentError("--domain expects numeric 'lo,hi'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wasserstein regression with empirical measures"};
    app.require_subcommand(1);

    rem::FitPredictOptions fit_opt;
    std::string fit_domain;
    auto* fit_cmd = app.add_subcommand(
        "fit-predict", "Fit a distribution-response regression and predict at query points");
    fit_cmd->add_option("--observations", fit_opt.observations_path, "observations CSV (unit_id,y)")
        ->required();
    fit_cmd->add_option("--units", fit_opt.units_path, "units CSV (unit_id,z1[,z2,...])")
        ->required();
    fit_cmd->add_option("--method", fit_opt.method, "global | local | two-step")
        ->check(CLI::IsMember({"global", "local", "two-step"}));
    fit_cmd->add_option("--bandwidth", fit_opt.bandwidth,
                        "local kernel bandwidth (default n^(-1/5))");
    fit_cmd->add_option("--kernel", fit_opt.kernel, "epanechnikov | triangular | quartic");
    fit_cmd->add_option("--grid-cap", fit_opt.grid_cap, "cap on the common quantile grid size");
    fit_cmd->add_option("--domain", fit_domain, "response domain as 'lo,hi'");
    fit_cmd->add_option("--queries", fit_opt.queries, "inline query list or a file path")
        ->required();
    fit_cmd->add_flag("--density,!--no-density", fit_opt.density,
                      "attach a density curve to each record");
    fit_cmd->add_option("--density-bandwidth", fit_opt.density_bandwidth,
                        "bandwidth of the density converter (default Silverman)");
    fit_cmd->add_option("--out", fit_opt.out, "output file (default stdout)");
    fit_cmd->add_option("--format", fit_opt.format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
    fit_cmd->add_option("--seed", fit_opt.seed, "reserved; fitting is deterministic");

    rem::SimulateOptions sim_opt;
    auto* sim_cmd =
        app.add_subcommand("simulate", "Run the Monte Carlo benchmark study");
    sim_cmd->add_option("--setting", sim_opt.setting, "I | II | III | IV");
    sim_cmd->add_option("--n-ladder", sim_opt.n_ladder, "sample sizes, e.g. 50,100,200")
        ->delimiter(',');
    sim_cmd->add_option("--runs", sim_opt.runs, "Monte Carlo runs per ladder point");
    sim_cmd->add_option("--seed", sim_opt.seed, "master seed");
    sim_cmd->add_option("--lambda-rate", sim_opt.lambda_rate,
                        "observations per unit ~ Poisson(rate * n)");
    sim_cmd->add_option("--out-dir", sim_opt.out_dir, "directory for result files")->required();
    sim_cmd->add_option("--workers", sim_opt.workers, "worker threads (0 = hardware)");
    sim_cmd->add_option("--grid-cap", sim_opt.grid_cap, "cap on the common quantile grid size");
    sim_cmd->add_flag("--two-step,!--no-two-step", sim_opt.include_two_step,
                      "also fit the two-step baseline (default on)");

    rem::BarycenterOptions bar_opt;
    std::string bar_domain;
    auto* bar_cmd = app.add_subcommand(
        "barycenter", "Equal-weight Wasserstein barycenter of all units");
    bar_cmd->add_option("--observations", bar_opt.observations_path, "observations CSV")
        ->required();
    bar_cmd->add_option("--units", bar_opt.units_path, "units CSV")->required();
    bar_cmd->add_option("--grid-cap", bar_opt.grid_cap, "cap on the common quantile grid size");
    bar_cmd->add_option("--domain", bar_domain, "response domain as 'lo,hi'");
    bar_cmd->add_flag("--density,!--no-density", bar_opt.density,
                      "attach a density curve to the record");
    bar_cmd->add_option("--density-bandwidth", bar_opt.density_bandwidth,
                        "bandwidth of the density converter (default Silverman)");
    bar_cmd->add_option("--out", bar_opt.out, "output file (default stdout)");
    bar_cmd->add_option("--format", bar_opt.format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit_cmd->parsed()) {
            fit_opt.domain = parse_domain(fit_domain);
            return rem::cmd_fit_predict(fit_opt);
        }
        if (sim_cmd->parsed()) {
            return rem::cmd_simulate(sim_opt);
        }
        bar_opt.domain = parse_domain(bar_domain);
        return rem::cmd_barycenter(bar_opt);
    } catch (const rem::Error& e) {
        std::cerr << R"({"error":{"code":")" << e.code() << R"(","message":")" << e.what()
                  << R"("}})" << "\n";
        return 1;
    }
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rem/measures.hpp"

namespace rem {

/// Options for the fit-predict command. `queries` is either an inline list
/// ("3,5" for scalar predictors; vector queries separated by ';') or the path
/// of a file with one query per line.
struct FitPredictOptions {
    std::string observations_path;
    std::string units_path;
    std::string method = "global";  // global | local | two-step
    double bandwidth = 0.0;         // local; <= 0 -> n^(-1/5)
    std::string kernel = "epanechnikov";
    int grid_cap = 5000;
    std::optional<DomainInterval> domain;
    std::string queries;
    bool density = false;
    double density_bandwidth = 0.0;  // <= 0 -> Silverman default
    int density_points = 200;
    std::string out;                 // empty -> stdout
    std::string format = "json";     // json | csv
    std::uint64_t seed = 0;          // reserved; fitting is deterministic
};

struct SimulateOptions {
    std::string setting = "I";
    std::vector<int> n_ladder = {100};
    int runs = 200;
    std::uint64_t seed = 0;
    double lambda_rate = 0.25;
    std::string out_dir = ".";
    int workers = 0;
    int grid_cap = 5000;
    int query_points = 100;
    bool include_two_step = true;
};

struct BarycenterOptions {
    std::string observations_path;
    std::string units_path;
    int grid_cap = 5000;
    std::optional<DomainInterval> domain;
    bool density = false;
    double density_bandwidth = 0.0;
    int density_points = 200;
    std::string out;
    std::string format = "json";
};

/// Each command returns a process exit code (0 on success) and reports
/// failures as machine-readable JSON on stderr.
int cmd_fit_predict(const FitPredictOptions& opt);

/// Writes <out_dir>/runs.jsonl, <out_dir>/summary.json and
/// <out_dir>/summary.csv; byte-identical for identical seeds regardless of
/// worker count.
int cmd_simulate(const SimulateOptions& opt);

int cmd_barycenter(const BarycenterOptions& opt);

}  // namespace rem

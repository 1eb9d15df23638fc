#pragma once

#include <istream>
#include <string>
#include <vector>

#include "rem/measures.hpp"

namespace rem {

/// Long-format dataset: per-unit covariates plus the pooled observations of
/// each unit. Units that appear in the units file but have zero observations
/// are excluded up front and listed in `excluded_units`.
struct LongFormatDataset {
    std::vector<std::string> unit_ids;
    std::vector<std::string> covariate_names;
    std::vector<std::vector<double>> covariates;  // n x p
    std::vector<EmpiricalMeasure> measures;       // one per retained unit
    std::vector<std::string> excluded_units;

    int n() const { return static_cast<int>(unit_ids.size()); }
    int p() const { return static_cast<int>(covariate_names.size()); }
};

/// Reads the two-file CSV layout: observations with header `unit_id,y` and
/// units with header `unit_id,z1[,z2,...]`. Validation errors (unknown unit
/// ids, non-numeric fields, arity mismatches) report row numbers.
LongFormatDataset ingest(const std::string& observations_path, const std::string& units_path);

LongFormatDataset ingest_streams(std::istream& observations, std::istream& units);

}  // namespace rem

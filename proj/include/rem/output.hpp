#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rem/measures.hpp"

namespace rem {

struct Diagnostics {
    double weight_min = 0.0;
    double weight_max = 0.0;
    int excluded_units = 0;
    bool extrapolation = false;
    std::vector<std::string> warnings;
};

/// One fitted distribution ready for serialization: the query, the method
/// that produced it, the quantile grid and optionally a density view.
struct OutputRecord {
    std::vector<double> query;
    std::string method;  // rem-global | rem-local | two-step
    int grid_size = 0;
    std::vector<double> quantiles;
    std::optional<DensityCurve> density;
    Diagnostics diagnostics;
};

/// Schema: {query, method, grid_size, quantiles:[...], density:{x,f}?,
/// diagnostics:{...}}; scalar queries serialize as a number, vector queries
/// as an array.
nlohmann::ordered_json record_to_json(const OutputRecord& rec);
OutputRecord record_from_json(const nlohmann::ordered_json& j);

/// JSON array of records, one per query. Canonical output format;
/// parse + re-serialize is byte-identical.
void write_records_json(std::ostream& os, const std::vector<OutputRecord>& records);
std::vector<OutputRecord> read_records_json(std::istream& is);

/// Flattened convenience view: header `query,method,kind,index,x,y` with the
/// quantile grid exploded to rows (x = cell midpoint probability) and density
/// rows appended when present. Values carry full double precision.
void write_records_csv(std::ostream& os, const std::vector<OutputRecord>& records);

/// Full-precision (round-trippable) decimal rendering of a double.
std::string format_double(double v);

}  // namespace rem

#include "rem/output.hpp"

#include <cstdio>

#include "rem/errors.hpp"

namespace rem {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::ordered_json record_to_json(const OutputRecord& rec) {
    nlohmann::ordered_json j;
    if (rec.query.size() == 1) {
        j["query"] = rec.query.front();
    } else {
        j["query"] = rec.query;
    }
    j["method"] = rec.method;
    j["grid_size"] = rec.grid_size;
    j["quantiles"] = rec.quantiles;
    if (rec.density) {
        j["density"] = {{"x", rec.density->x},
                        {"f", rec.density->f},
                        {"degenerate", rec.density->degenerate}};
    }
    j["diagnostics"] = {{"weight_min", rec.diagnostics.weight_min},
                        {"weight_max", rec.diagnostics.weight_max},
                        {"excluded_units", rec.diagnostics.excluded_units},
                        {"extrapolation", rec.diagnostics.extrapolation},
                        {"warnings", rec.diagnostics.warnings}};
    return j;
}

OutputRecord record_from_json(const nlohmann::ordered_json& j) {
    OutputRecord rec;
    if (j.at("query").is_array()) {
        rec.query = j.at("query").get<std::vector<double>>();
    } else {
        rec.query = {j.at("query").get<double>()};
    }
    rec.method = j.at("method").get<std::string>();
    rec.grid_size = j.at("grid_size").get<int>();
    rec.quantiles = j.at("quantiles").get<std::vector<double>>();
    if (j.contains("density")) {
        DensityCurve d;
        d.x = j.at("density").at("x").get<std::vector<double>>();
        d.f = j.at("density").at("f").get<std::vector<double>>();
        d.degenerate = j.at("density").at("degenerate").get<bool>();
        rec.density = std::move(d);
    }
    const auto& diag = j.at("diagnostics");
    rec.diagnostics.weight_min = diag.at("weight_min").get<double>();
    rec.diagnostics.weight_max = diag.at("weight_max").get<double>();
    rec.diagnostics.excluded_units = diag.at("excluded_units").get<int>();
    rec.diagnostics.extrapolation = diag.at("extrapolation").get<bool>();
    rec.diagnostics.warnings = diag.at("warnings").get<std::vector<std::string>>();
    return rec;
}

void write_records_json(std::ostream& os, const std::vector<OutputRecord>& records) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& rec : records) arr.push_back(record_to_json(rec));
    os << arr.dump(2) << "\n";
}

std::vector<OutputRecord> read_records_json(std::istream& is) {
    nlohmann::ordered_json arr;
    is >> arr;
    if (!arr.is_array()) throw InvalidArgumentError("records JSON: expected an array");
    std::vector<OutputRecord> records;
    records.reserve(arr.size());
    for (const auto& j : arr) records.push_back(record_from_json(j));
    return records;
}

void write_records_csv(std::ostream& os, const std::vector<OutputRecord>& records) {
    os << "query,method,kind,index,x,y\n";
    for (const auto& rec : records) {
        std::string query;
        for (std::size_t j = 0; j < rec.query.size(); ++j) {
            if (j > 0) query += ';';
            query += format_double(rec.query[j]);
        }
        const int m = rec.grid_size;
        for (int i = 0; i < m; ++i) {
            const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
            os << query << ',' << rec.method << ",quantile," << i << ',' << format_double(p)
               << ',' << format_double(rec.quantiles[static_cast<std::size_t>(i)]) << '\n';
        }
        if (rec.density) {
            for (std::size_t i = 0; i < rec.density->x.size(); ++i) {
                os << query << ',' << rec.method << ",density," << i << ','
                   << format_double(rec.density->x[i]) << ',' << format_double(rec.density->f[i])
                   << '\n';
            }
        }
    }
}

}  // namespace rem

#include "rem/dataset.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "rem/log.hpp"

namespace rem {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw, const std::string& file, int row,
                    const std::string& column) {
    const std::string s = strip(raw);
    double value = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || s.empty()) {
        throw IngestError(file + " row " + std::to_string(row) + ": non-numeric value '" + raw +
                          "' in column " + column);
    }
    return value;
}

}  // namespace

LongFormatDataset ingest_streams(std::istream& observations, std::istream& units) {
    LongFormatDataset ds;

    std::string line;
    if (!std::getline(units, line)) throw IngestError("units: empty file");
    auto header = split_csv_line(line);
    if (header.empty() || strip(header[0]) != "unit_id" || header.size() < 2) {
        throw IngestError("units row 1: header must be unit_id,z1[,z2,...]");
    }
    for (std::size_t j = 1; j < header.size(); ++j) {
        const std::string name = strip(header[j]);
        if (name.empty()) throw IngestError("units row 1: empty covariate column name");
        ds.covariate_names.push_back(name);
    }
    const std::size_t p = ds.covariate_names.size();

    std::vector<std::string> ids;
    std::vector<std::vector<double>> covariates;
    std::map<std::string, std::size_t> index_of;
    int row = 1;
    while (std::getline(units, line)) {
        ++row;
        if (strip(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != p + 1) {
            throw IngestError("units row " + std::to_string(row) + ": expected " +
                              std::to_string(p + 1) + " fields, got " +
                              std::to_string(fields.size()));
        }
        const std::string id = strip(fields[0]);
        if (id.empty()) throw IngestError("units row " + std::to_string(row) + ": empty unit_id");
        if (index_of.count(id)) {
            throw IngestError("units row " + std::to_string(row) + ": duplicate unit_id '" + id +
                              "'");
        }
        std::vector<double> zrow(p);
        for (std::size_t j = 0; j < p; ++j) {
            zrow[j] = parse_number(fields[j + 1], "units", row, ds.covariate_names[j]);
        }
        index_of[id] = ids.size();
        ids.push_back(id);
        covariates.push_back(std::move(zrow));
    }
    if (ids.empty()) throw IngestError("units: no units listed");

    if (!std::getline(observations, line)) throw IngestError("observations: empty file");
    auto oheader = split_csv_line(line);
    if (oheader.size() != 2 || strip(oheader[0]) != "unit_id" || strip(oheader[1]) != "y") {
        throw IngestError("observations row 1: header must be unit_id,y");
    }
    std::vector<std::vector<double>> samples(ids.size());
    row = 1;
    while (std::getline(observations, line)) {
        ++row;
        if (strip(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 2) {
            throw IngestError("observations row " + std::to_string(row) +
                              ": expected 2 fields, got " + std::to_string(fields.size()));
        }
        const std::string id = strip(fields[0]);
        const auto it = index_of.find(id);
        if (it == index_of.end()) {
            throw IngestError("observations row " + std::to_string(row) + ": unknown unit_id '" +
                              id + "'");
        }
        samples[it->second].push_back(parse_number(fields[1], "observations", row, "y"));
    }

    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (samples[i].empty()) {
            log::warn(log::w_empty_unit,
                      "unit '" + ids[i] + "' has no observations and is excluded");
            ds.excluded_units.push_back(ids[i]);
            continue;
        }
        ds.unit_ids.push_back(ids[i]);
        ds.covariates.push_back(covariates[i]);
        ds.measures.emplace_back(std::move(samples[i]));
    }
    if (ds.unit_ids.empty()) {
        throw IngestError("dataset: every unit has zero observations");
    }
    return ds;
}

LongFormatDataset ingest(const std::string& observations_path, const std::string& units_path) {
    std::ifstream obs(observations_path);
    if (!obs) throw IngestError("cannot open observations file '" + observations_path + "'");
    std::ifstream units(units_path);
    if (!units) throw IngestError("cannot open units file '" + units_path + "'");
    return ingest_streams(obs, units);
}

}  // namespace rem

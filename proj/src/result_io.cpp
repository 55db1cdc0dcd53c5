#include "cogmac/result_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace cogmac {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::analytic: return "analytic";
        case Provenance::simulated: return "simulated";
        case Provenance::optimized: return "optimized";
    }
    return "analytic";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "analytic") return Provenance::analytic;
    if (s == "simulated") return Provenance::simulated;
    if (s == "optimized") return Provenance::optimized;
    throw ValidationError("unknown provenance '" + s + "'");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

const char* kFixedColumns[] = {"metric", "value",     "std_error",
                               "provenance", "seed",  "tolerance"};

std::vector<std::string> coord_keys(const std::vector<ResultRow>& rows) {
    std::vector<std::string> keys;
    for (const auto& row : rows)
        for (const auto& [k, v] : row.coords)
            if (std::find(keys.begin(), keys.end(), k) == keys.end())
                keys.push_back(k);
    return keys;
}

void check_text(const std::string& s, const char* what) {
    if (s.find_first_of(",\n\"") != std::string::npos)
        throw ValidationError(std::string(what) +
                              " must not contain commas, quotes or newlines: '" +
                              s + "'");
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

} // namespace

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    const auto keys = coord_keys(rows);
    for (const auto& k : keys) check_text(k, "coordinate key");
    std::string header;
    for (const auto& k : keys) header += k + ",";
    for (std::size_t i = 0; i < std::size(kFixedColumns); ++i) {
        header += kFixedColumns[i];
        if (i + 1 < std::size(kFixedColumns)) header += ",";
    }
    out << header << "\n";
    for (const auto& row : rows) {
        check_text(row.metric, "metric");
        check_text(row.tolerance, "tolerance");
        std::string line;
        for (const auto& k : keys) {
            auto it = std::find_if(row.coords.begin(), row.coords.end(),
                                   [&](const auto& kv) { return kv.first == k; });
            if (it != row.coords.end()) line += format_double(it->second);
            line += ",";
        }
        line += row.metric + ",";
        line += format_double(row.value) + ",";
        if (row.std_error) line += format_double(*row.std_error);
        line += ",";
        line += to_string(row.provenance) + ",";
        line += std::to_string(row.seed) + ",";
        line += row.tolerance;
        out << line << "\n";
    }
}

std::vector<ResultRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("result csv: missing header");
    const auto cols = split_csv_line(line);
    const std::size_t fixed = std::size(kFixedColumns);
    if (cols.size() < fixed)
        throw ValidationError("result csv: header too short");
    const std::size_t nkeys = cols.size() - fixed;
    for (std::size_t i = 0; i < fixed; ++i)
        if (cols[nkeys + i] != kFixedColumns[i])
            throw ValidationError("result csv: unexpected header column '" +
                                  cols[nkeys + i] + "'");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != cols.size())
            throw ValidationError("result csv: row has " +
                                  std::to_string(cells.size()) +
                                  " cells, expected " +
                                  std::to_string(cols.size()));
        ResultRow row;
        for (std::size_t i = 0; i < nkeys; ++i)
            if (!cells[i].empty())
                row.coords.emplace_back(cols[i], std::strtod(cells[i].c_str(), nullptr));
        row.metric = cells[nkeys];
        row.value = std::strtod(cells[nkeys + 1].c_str(), nullptr);
        if (!cells[nkeys + 2].empty())
            row.std_error = std::strtod(cells[nkeys + 2].c_str(), nullptr);
        row.provenance = provenance_from_string(cells[nkeys + 3]);
        row.seed = std::strtoull(cells[nkeys + 4].c_str(), nullptr, 10);
        row.tolerance = cells[nkeys + 5];
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

nlohmann::json row_to_json(const ResultRow& row) {
    nlohmann::json coords = nlohmann::json::array();
    for (const auto& [k, v] : row.coords)
        coords.push_back(nlohmann::json::array({k, v}));
    nlohmann::json j{{"coords", coords},
                     {"metric", row.metric},
                     {"value", row.value},
                     {"provenance", to_string(row.provenance)},
                     {"seed", row.seed},
                     {"tolerance", row.tolerance}};
    if (row.std_error)
        j["std_error"] = *row.std_error;
    else
        j["std_error"] = nullptr;
    return j;
}

} // namespace

void write_jsonl(const std::vector<ResultRow>& rows, std::ostream& out) {
    for (const auto& row : rows) out << row_to_json(row).dump() << "\n";
}

std::vector<ResultRow> read_jsonl(std::istream& in) {
    std::vector<ResultRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        ResultRow row;
        for (const auto& kv : j.at("coords"))
            row.coords.emplace_back(kv.at(0).get<std::string>(),
                                    kv.at(1).get<double>());
        row.metric = j.at("metric").get<std::string>();
        row.value = j.at("value").get<double>();
        if (!j.at("std_error").is_null())
            row.std_error = j.at("std_error").get<double>();
        row.provenance = provenance_from_string(j.at("provenance").get<std::string>());
        row.seed = j.at("seed").get<std::uint64_t>();
        row.tolerance = j.at("tolerance").get<std::string>();
        rows.push_back(std::move(row));
    }
    return rows;
}

void emit_results(const std::vector<ResultRow>& rows, ResultFormat format,
                  const std::string& path, const std::string& manifest_json) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot open output file '" + path + "'");
    if (format == ResultFormat::csv)
        write_csv(rows, out);
    else
        write_jsonl(rows, out);
    if (!out)
        throw ValidationError("write failed for '" + path + "'");
    std::ofstream mf(path + ".manifest.json");
    if (!mf)
        throw ValidationError("cannot open manifest for '" + path + "'");
    mf << manifest_json << "\n";
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace cogmac

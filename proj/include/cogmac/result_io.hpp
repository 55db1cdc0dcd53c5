#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cogmac/errors.hpp"

namespace cogmac {

enum class Provenance { analytic, simulated, optimized };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

/// One metric value at one sweep point. Numbers are rendered with 17
/// significant digits so a parsed file reproduces the original bit for bit.
struct ResultRow {
    std::vector<std::pair<std::string, double>> coords; // e.g. {"M", 12}
    std::string metric;
    double value = 0.0;
    std::optional<double> std_error; // empty for analytic rows
    Provenance provenance = Provenance::analytic;
    std::uint64_t seed = 0;
    std::string tolerance; // solver/quadrature tolerance metadata, may be empty

    bool operator==(const ResultRow&) const = default;
};

/// Header: <coord keys in first-seen order>, metric, value, std_error,
/// provenance, seed, tolerance.
void write_csv(const std::vector<ResultRow>& rows, std::ostream& out);
std::vector<ResultRow> read_csv(std::istream& in);

void write_jsonl(const std::vector<ResultRow>& rows, std::ostream& out);
std::vector<ResultRow> read_jsonl(std::istream& in);

enum class ResultFormat { csv, jsonl };

/// Writes rows plus a sibling `<path>.manifest.json` recording the command,
/// seed, config hash and any generated parameters, so every row is
/// reproducible from the file pair alone.
void emit_results(const std::vector<ResultRow>& rows, ResultFormat format,
                  const std::string& path, const std::string& manifest_json);

/// FNV-1a 64-bit content hash, hex encoded; used as the config fingerprint in
/// run manifests.
std::string fnv1a_hex(const std::string& bytes);

std::string format_double(double v); // %.17g

} // namespace cogmac

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "ringlab/equilibria.hpp"
#include "ringlab/oscillation.hpp"

namespace ringlab::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "1.0";

// Shortest decimal text that reads back to the same double; "nan"/"inf" spelled out.
std::string format_number(double v);

// RFC 4180: fields containing a comma, quote, CR or LF are quoted, quotes doubled.
std::string csv_field(const std::string& s);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(const std::vector<std::string>& fields);
    void add_row(const std::vector<double>& values);
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

Json to_json(const ModelParams& p);
Json to_json(const EquilibriumConfig& c);
Json to_json(const OscillationSpec& s);
Json to_json(const IntegratorSpec& s);
Json to_json(const QuadratureSpec& q);
Json to_json(const FixedPoint& f);

}  // namespace ringlab::io

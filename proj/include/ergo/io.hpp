#pragma once

// Deterministic result serialization shared by the CLI and the tests:
// fixed column order, %.12e doubles, exact rationals as "p/q" strings,
// no timestamps or timing in any output file.

#include "ergo/arith.hpp"

#include <string>
#include <vector>

#include "json.hpp"

namespace ergo {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // each row matches columns in length
};

std::string fmt_double(double v);
std::string csv_escape(const std::string& cell);
std::string table_csv(const Table& t);
nlohmann::json table_json(const Table& t);  // array of objects, keys sorted

void write_text_file(const std::string& path, const std::string& content);
nlohmann::json load_json_file(const std::string& path);

// writes results.csv / results.json / summary.json into outDir per format
// ("csv", "json", "both"); creates outDir if needed
void write_outputs(const std::string& outDir, const std::string& format, const Table& results,
                   const nlohmann::json& summary);

}  // namespace ergo

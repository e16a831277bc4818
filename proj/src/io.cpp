#include "ergo/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ergo {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

std::string csv_escape(const std::string& cell) {
  bool needs = cell.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string table_csv(const Table& t) {
  std::ostringstream os;
  for (size_t i = 0; i < t.columns.size(); ++i) {
    if (i) os << ',';
    os << csv_escape(t.columns[i]);
  }
  os << '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw InputError("row width does not match the header");
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << csv_escape(row[i]);
    }
    os << '\n';
  }
  return os.str();
}

nlohmann::json table_json(const Table& t) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw InputError("row width does not match the header");
    nlohmann::json obj = nlohmann::json::object();
    for (size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = row[i];
    arr.push_back(obj);
  }
  return arr;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path);
  out << content;
  if (!out) throw InputError("write failed: " + path);
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("invalid json in " + path + ": " + e.what());
  }
  return j;
}

void write_outputs(const std::string& outDir, const std::string& format, const Table& results,
                   const nlohmann::json& summary) {
  if (format != "csv" && format != "json" && format != "both")
    throw InputError("format must be csv, json, or both");
  std::error_code ec;
  std::filesystem::create_directories(outDir, ec);
  if (ec) throw InputError("cannot create output directory: " + outDir);
  if (format == "csv" || format == "both")
    write_text_file(outDir + "/results.csv", table_csv(results));
  if (format == "json" || format == "both")
    write_text_file(outDir + "/results.json", table_json(results).dump(2) + "\n");
  write_text_file(outDir + "/summary.json", summary.dump(2) + "\n");
}

}  // namespace ergo

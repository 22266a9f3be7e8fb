#include "blowup/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "blowup/errors.hpp"

namespace blowup {

using nlohmann::ordered_json;

ordered_json real_cell(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const ordered_json& v) {
  if (v.is_number_float()) return format_real(v.get<double>());
  if (v.is_string()) return csv_field(v.get<std::string>());
  if (v.is_null()) return "";
  return csv_field(v.dump());
}

void write_block(std::ostream& os, const char* prefix, const ordered_json& block) {
  for (const auto& [key, value] : block.items()) {
    os << "# " << prefix << key << '=' << cell_text(value) << '\n';
  }
}

template <typename T>
T field(const ordered_json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("report is missing '") + key + "'", 0);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("report field '") + key + "' has the wrong type", 0);
  }
}

}  // namespace

ordered_json to_json(const RunReport& r) {
  ordered_json j;
  j["schema_version"] = r.schema_version;
  j["command"] = r.command;
  j["nl"] = r.nl;
  j["params"] = r.params;
  j["columns"] = r.columns;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) rows.push_back(row);
  j["rows"] = std::move(rows);
  j["summary"] = r.summary;
  return j;
}

RunReport report_from_json(const ordered_json& j) {
  RunReport r;
  r.schema_version = field<int>(j, "schema_version");
  r.command = field<std::string>(j, "command");
  r.nl = field<std::string>(j, "nl");
  r.params = field<ordered_json>(j, "params");
  r.columns = field<std::vector<std::string>>(j, "columns");
  for (const auto& row : field<ordered_json>(j, "rows")) {
    if (!row.is_array() || row.size() != r.columns.size()) {
      throw ParseError("report row does not match the column count", 0);
    }
    r.rows.emplace_back(row.begin(), row.end());
  }
  r.summary = field<ordered_json>(j, "summary");
  return r;
}

void write_csv(std::ostream& os, const RunReport& r) {
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    os << (i ? "," : "") << csv_field(r.columns[i]);
  }
  os << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << '\n';
  }
  os << "# schema_version=" << r.schema_version << '\n';
  os << "# command=" << r.command << '\n';
  if (!r.nl.empty()) os << "# nl=" << r.nl << '\n';
  write_block(os, "", r.params);
  write_block(os, "summary.", r.summary);
}

void write_json(std::ostream& os, const RunReport& r) { os << to_json(r).dump(2) << '\n'; }

}  // namespace blowup

#pragma once

// Tabular run reports written as CSV or JSON.
//
// CSV: a header line, one line per row (reals with 9 significant digits),
// then `# key=value` lines for the parameter and summary blocks. JSON holds
// the same fields verbatim and parses back into an equal report.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace blowup {

inline constexpr int kSchemaVersion = 1;

struct RunReport {
  int schema_version = kSchemaVersion;
  std::string command;
  std::string nl;                  // nonlinearity spec echo, may be empty
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::ordered_json>> rows;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();

  bool operator==(const RunReport&) const = default;
};

/// Cell for a real; non-finite values become the strings "nan", "inf" and
/// "-inf" so that JSON keeps them.
nlohmann::ordered_json real_cell(double x);

/// Real with 9 significant digits, as used in CSV output.
std::string format_real(double x);

nlohmann::ordered_json to_json(const RunReport& r);
/// Throws ParseError when a field is missing or has the wrong type.
RunReport report_from_json(const nlohmann::ordered_json& j);

void write_csv(std::ostream& os, const RunReport& r);
void write_json(std::ostream& os, const RunReport& r);

}  // namespace blowup

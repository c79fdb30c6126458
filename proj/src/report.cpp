#include "oplog/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace oplog {

namespace {

/// JSON has no NaN or infinity; those become strings.
Json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? end : buf);
}

Check& Report::expect_at_most(const std::string& name, double value, double tolerance) {
  checks.push_back({name, value, tolerance, std::isfinite(value) && value <= tolerance});
  return checks.back();
}

Check& Report::expect_at_least(const std::string& name, double value, double threshold) {
  checks.push_back({name, value, threshold, std::isfinite(value) && value >= threshold});
  return checks.back();
}

Check& Report::require(const std::string& name, bool held) {
  checks.push_back({name, held ? 1.0 : 0.0, 1.0, held});
  return checks.back();
}

bool Report::passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::vector<std::string> Report::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.pass) out.push_back(c.name);
  return out;
}

Json Report::to_json() const {
  Json j;
  j["command"] = command;
  j["params"] = params;
  Json cs = Json::array();
  for (const auto& c : checks)
    cs.push_back(Json{{"name", c.name},
                      {"value", number_or_string(c.value)},
                      {"tolerance", number_or_string(c.tolerance)},
                      {"pass", c.pass}});
  j["checks"] = std::move(cs);
  j["pass"] = passed();
  for (const auto& [key, value] : payload.items()) j[key] = value;
  return j;
}

std::string Report::to_csv() const {
  std::ostringstream os;
  os << "name,value,tolerance,pass\n";
  for (const auto& c : checks)
    os << csv_field(c.name) << ',' << format_double(c.value) << ',' << format_double(c.tolerance) << ','
       << (c.pass ? "true" : "false") << '\n';
  if (table) {
    os << '\n';
    for (std::size_t k = 0; k < table->columns.size(); ++k) os << (k ? "," : "") << csv_field(table->columns[k]);
    os << '\n';
    for (const auto& row : table->rows) {
      for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_field(row[k]);
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace oplog

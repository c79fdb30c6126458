#include "oplog/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

namespace oplog {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InvalidInput, what); }

double parse_real(std::string_view s, std::string_view whole) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v))
    bad("cannot parse complex number '" + std::string(whole) + "'");
  return v;
}

double finite_number(const Json& j, const char* where) {
  if (!j.is_number()) bad(std::string(where) + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(std::string(where) + ": non-finite value");
  return v;
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {finite_number(j, "complex"), 0.0};
  if (!j.is_array() || j.size() != 2) bad("complex entries must be [re, im]");
  return {finite_number(j[0], "complex re"), finite_number(j[1], "complex im")};
}

Complex parse_complex(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s += c;
  if (s.empty()) bad("empty complex number");
  if (s.front() == '+') s.erase(0, 1);
  if (s.empty()) bad("cannot parse complex number '" + std::string(text) + "'");
  const char last = s.back();
  if (last != 'i' && last != 'j') return {parse_real(s, text), 0.0};
  s.pop_back();
  // Split at the last sign that is neither leading nor part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  const std::string re = split == std::string::npos ? "" : s.substr(0, split);
  std::string im = split == std::string::npos ? s : s.substr(split);
  if (!im.empty() && im.front() == '+') im.erase(0, 1);
  double imag = 0.0;
  if (im.empty())
    imag = 1.0;
  else if (im == "-")
    imag = -1.0;
  else
    imag = parse_real(im, text);
  return {re.empty() ? 0.0 : parse_real(re, text), imag};
}

Json matrix_to_json(const OperatorMatrix& m) {
  const auto& d = m.dense();
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < d.cols(); ++j) row.push_back(complex_to_json(d(i, j)));
    rows.push_back(std::move(row));
  }
  return Json{{"n", d.rows()}, {"entries", std::move(rows)}};
}

OperatorMatrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("entries")) bad("matrix JSON needs \"n\" and \"entries\"");
  if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1) bad("matrix \"n\" must be a positive integer");
  const auto n = static_cast<Eigen::Index>(j["n"].get<long long>());
  const Json& rows = j["entries"];
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) bad("matrix must have n rows");
  OperatorMatrix::Dense d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = rows[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) bad("matrix is not square");
    for (Eigen::Index k = 0; k < n; ++k) d(i, k) = complex_from_json(row[k]);
  }
  return OperatorMatrix(std::move(d));
}

OperatorMatrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open matrix file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    bad("matrix file " + path.string() + " is not valid JSON: " + e.what());
  }
  return matrix_from_json(j);
}

Json grid_to_json(const GridFunction& f) {
  Json values = Json::array();
  for (int j = 0; j < f.n; ++j) values.push_back(complex_to_json(f.values(j)));
  return Json{{"n", f.n}, {"L", f.length}, {"values", std::move(values)}};
}

GridFunction grid_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("L") || !j.contains("values"))
    bad("grid JSON needs \"n\", \"L\" and \"values\"");
  if (!j["n"].is_number_integer()) bad("grid \"n\" must be an integer");
  const long long n = j["n"].get<long long>();
  const Json& vals = j["values"];
  if (!vals.is_array() || static_cast<long long>(vals.size()) != n) bad("grid \"values\" must have n entries");
  Eigen::VectorXcd v(n);
  for (long long k = 0; k < n; ++k) v(k) = complex_from_json(vals[k]);
  return GridFunction(finite_number(j["L"], "grid L"), std::move(v));
}

}  // namespace oplog

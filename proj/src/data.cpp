#include "verimech/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

namespace verimech {

ParseError::ParseError(const std::string& path, int line, const std::string& msg)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + msg), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

DiscreteDistribution load_histogram(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError(path, 1, "empty file, expected header t,weight");
  ++lineno;
  if (trim(line) != "t,weight") throw ParseError(path, lineno, "expected header t,weight");

  struct Row {
    double t;
    double weight;
    int line;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError(path, lineno, "expected two comma-separated fields");
    }
    double t = 0.0;
    double w = 0.0;
    if (!parse_double(line.substr(0, comma), t)) throw ParseError(path, lineno, "bad type value");
    if (!parse_double(line.substr(comma + 1), w)) throw ParseError(path, lineno, "bad weight value");
    if (t < 0.0 || t > 1.0) throw ParseError(path, lineno, "type " + trim(line.substr(0, comma)) + " outside [0,1]");
    if (w < 0.0) throw ParseError(path, lineno, "negative weight");
    rows.push_back({t, w, lineno});
  }
  if (rows.empty()) throw ParseError(path, lineno, "no data rows");

  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    return x.t < y.t || (x.t == y.t && x.line < y.line);
  });
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].t == rows[k - 1].t) {
      throw ParseError(path, rows[k].line, "duplicate type (first seen on line " +
                                               std::to_string(rows[k - 1].line) + ")");
    }
  }

  double total = 0.0;
  for (const auto& r : rows) total += r.weight;
  if (!(total > 0.0)) throw ParseError(path, lineno, "all weights are zero");
  // Files that already hold masses are kept bit-exact.
  const bool normalized = std::abs(total - 1.0) <= 1e-12;

  std::vector<double> support;
  std::vector<double> mass;
  for (const auto& r : rows) {
    support.push_back(r.t);
    mass.push_back(normalized ? r.weight : r.weight / total);
  }
  return {std::move(support), std::move(mass)};
}

void save_histogram(const std::string& path, const DiscreteDistribution& p) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t,weight\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << format_double(p.support()[i]) << ',' << format_double(p.mass()[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

Population load_population(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> types;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    double t = 0.0;
    if (!parse_double(body, t)) throw ParseError(path, lineno, "bad type value");
    if (t < 0.0 || t > 1.0) throw ParseError(path, lineno, "type outside [0,1]");
    types.push_back(t);
  }
  if (types.empty()) throw ParseError(path, lineno, "no agents");
  return Population(std::move(types));
}

DiscreteDistribution beta_discretize(double a, double b, int m) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("beta parameters must be positive");
  if (m < 2) throw std::invalid_argument("beta discretization needs m >= 2");
  const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  std::vector<double> support(static_cast<std::size_t>(m));
  std::vector<double> mass(static_cast<std::size_t>(m));
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = (i + 0.5) / m;
    const double density = std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
    support[static_cast<std::size_t>(i)] = x;
    mass[static_cast<std::size_t>(i)] = density;
    total += density;
  }
  for (double& w : mass) w /= total;
  return {std::move(support), std::move(mass)};
}

}  // namespace verimech

#include "cli_common.hpp"

#include <charconv>
#include <cmath>

#include "verimech/data.hpp"
#include "verimech/mechanisms.hpp"

namespace verimech::cli {

namespace {

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw UsageError("invalid number '" + s + "' for " + what);
  }
  return v;
}

int to_int(const std::string& s, const std::string& what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("invalid integer '" + s + "' for " + what);
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

void expect_keys(const MechanismSpec& spec, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : spec.args) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw UsageError("unknown parameter '" + key + "' for mechanism " + spec.name);
  }
}

}  // namespace

double MechanismSpec::get(const std::string& key, double fallback) const {
  auto it = args.find(key);
  return it == args.end() ? fallback : it->second;
}

MechanismSpec parse_mechanism_spec(const std::string& text) {
  MechanismSpec spec;
  const auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  if (spec.name.empty()) throw UsageError("empty mechanism name");
  if (colon == std::string::npos) return spec;
  for (const auto& kv : split(text.substr(colon + 1), ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("expected key=value in mechanism spec, got '" + kv + "'");
    spec.args[kv.substr(0, eq)] = to_double(kv.substr(eq + 1), kv.substr(0, eq));
  }
  return spec;
}

Mechanism build_mechanism(const MechanismSpec& spec, double xi) {
  try {
    if (spec.name == "lv") {
      expect_keys(spec, {});
      return make_lv();
    }
    if (spec.name == "payall") {
      expect_keys(spec, {});
      return make_pay_all();
    }
    if (spec.name == "verifyall") {
      expect_keys(spec, {});
      return make_verify_all();
    }
    if (spec.name == "hugepenalty") {
      expect_keys(spec, {"eps"});
      return make_huge_penalty(spec.get("eps", 0.1));
    }
    if (spec.name == "mcv") {
      expect_keys(spec, {"gamma", "xi"});
      if (!spec.has("gamma")) throw UsageError("mcv needs gamma=...");
      return make_mcv({spec.get("gamma", 0.0), spec.get("xi", xi)});
    }
    if (spec.name == "pv") {
      expect_keys(spec, {"kappa", "theta"});
      if (!spec.has("kappa")) throw UsageError("pv needs kappa=...");
      const double k = spec.get("kappa", 1.0);
      if (k != std::floor(k) || k < 1.0) throw UsageError("pv kappa must be a positive integer");
      const int kappa = static_cast<int>(k);
      const double theta = spec.get("theta", std::min(theta_star(xi, kappa), 1.0));
      return make_pv({theta, kappa});
    }
    if (spec.name == "asmcv") throw UsageError("asmcv is per-agent; use it with simulate");
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  throw UsageError("unknown mechanism '" + spec.name + "'");
}

DiscreteDistribution parse_distribution(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (kind == "uniform") return DiscreteDistribution::uniform_grid(to_int(rest, "uniform:M"));
    if (kind == "beta") {
      const auto parts = split(rest, ':');
      if (parts.size() != 2) throw UsageError("expected beta:a,b:M");
      const auto ab = split(parts[0], ',');
      if (ab.size() != 2) throw UsageError("expected beta:a,b:M");
      return beta_discretize(to_double(ab[0], "beta a"), to_double(ab[1], "beta b"),
                             to_int(parts[1], "beta M"));
    }
    if (kind == "file") {
      if (rest.empty()) throw UsageError("expected file:PATH");
      return load_histogram(rest);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  throw UsageError("unknown distribution '" + text + "' (uniform:M | beta:a,b:M | file:PATH)");
}

PerformanceModel parse_performance(const std::string& text) {
  if (text == "deterministic") return PerformanceModel::deterministic();
  if (text == "bernoulli") return PerformanceModel::bernoulli_scaled();
  if (text.rfind("two_point:", 0) == 0) {
    const double d = to_double(text.substr(10), "two_point delta");
    if (d < 0.0) throw UsageError("two_point delta must be non-negative");
    return PerformanceModel::two_point(d);
  }
  throw UsageError("unknown performance model '" + text + "' (deterministic | two_point:D | bernoulli)");
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& part : split(text, ',')) out.push_back(to_int(part, "integer list"));
  return out;
}

void write_sweep_csv(std::ostream& out, const Curve& curve) {
  out << "param,e,mu,flagged\n";
  for (const auto& p : curve.points) {
    out << format_double(p.param) << ',' << format_double(p.bias) << ',' << format_double(p.ver)
        << ',' << (p.flagged ? 1 : 0) << '\n';
  }
}

std::string expand_output_path(const std::string& pattern, double xi) {
  std::string out = pattern;
  const auto pos = out.find("{xi}");
  if (pos != std::string::npos) out.replace(pos, 4, format_double(xi));
  return out;
}

}  // namespace verimech::cli

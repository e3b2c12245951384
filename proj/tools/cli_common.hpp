#pragma once

#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "verimech/core.hpp"
#include "verimech/metrics.hpp"

namespace verimech::cli {

/// Bad flag value or spec string; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed `name[:key=value,...]` mechanism string.
struct MechanismSpec {
  std::string name;
  std::map<std::string, double> args;

  double get(const std::string& key, double fallback) const;
  bool has(const std::string& key) const { return args.count(key) != 0; }
};

MechanismSpec parse_mechanism_spec(const std::string& text);

/// Builds a single mechanism. `asmcv` is per-agent and rejected here.
/// pv without theta uses min(theta_star(xi, kappa), 1).
Mechanism build_mechanism(const MechanismSpec& spec, double xi);

/// `uniform:M | beta:a,b:M | file:PATH`.
DiscreteDistribution parse_distribution(const std::string& text);

/// `deterministic | two_point:DELTA | bernoulli`.
PerformanceModel parse_performance(const std::string& text);

/// Comma-separated integer list.
std::vector<int> parse_int_list(const std::string& text);

/// Header `param,e,mu,flagged`, one row per point.
void write_sweep_csv(std::ostream& out, const Curve& curve);

/// Substitutes `{xi}` in an output path template.
std::string expand_output_path(const std::string& pattern, double xi);

}  // namespace verimech::cli

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "verimech/core.hpp"

namespace verimech {

/// Malformed input file. what() names the file and line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

/// Reads a `t,weight` CSV and normalizes weights into masses.
DiscreteDistribution load_histogram(const std::string& path);

/// Writes `t,weight` with masses as weights, in shortest round-trip form.
void save_histogram(const std::string& path, const DiscreteDistribution& p);

/// One type per line; blank lines and `#` comments are skipped.
Population load_population(const std::string& path);

/// Midpoints of m equal bins of [0,1], weighted by the Beta(a,b) density.
DiscreteDistribution beta_discretize(double a, double b, int m);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

}  // namespace verimech

#pragma once

// Test-only broken mechanisms. Each one violates truthfulness on purpose.

#include <cmath>

#include "verimech/core.hpp"
#include "verimech/mechanisms.hpp"

namespace fixtures {

// Audits the reports below the cutoff instead of those above it.
inline verimech::Mechanism inverted_mcv(double gamma) {
  return verimech::Mechanism::create(
      "broken-inverted-mcv", [gamma](double r) { return r <= gamma ? 1.0 : 0.0; },
      [](double r) { return r; }, [](double r, double s) { return std::abs(s - r) <= 1e-9 ? r : 0.0; },
      0.0, false, {gamma});
}

// Audits half as often as the cheating identity needs.
inline verimech::Mechanism half_audit_mcv(double gamma, double xi) {
  const auto base = verimech::make_mcv({gamma, xi});
  return verimech::Mechanism::create(
      "broken-half-audit-mcv", [base](double r) { return 0.5 * base.verify_prob(r); },
      base.grade_unverified, base.grade_verified, xi, false, {gamma});
}

}  // namespace fixtures

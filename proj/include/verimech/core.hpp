#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace verimech {

/// Tolerance used when comparing a verified sample against the report.
inline constexpr double kSampleMatchTol = 1e-9;

/// A probability distribution over a finite, strictly increasing support in [0,1].
///
/// Zero-mass support points are allowed; t_min()/t_max() only consider points
/// with positive mass.
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<double> support, std::vector<double> mass);

  /// Groups equal values and weights each by its multiplicity.
  static DiscreteDistribution empirical(std::span<const double> values);
  /// m equally spaced points 0, 1/(m-1), ..., 1 with equal mass.
  static DiscreteDistribution uniform_grid(int m);
  static DiscreteDistribution point_mass(double t);

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& mass() const { return mass_; }
  std::size_t size() const { return support_.size(); }

  double t_min() const;
  double t_max() const;
  double mean() const;
  double variance() const;
  /// Mass at t, or 0 when t is not a support point (exact match).
  double mass_at(double t) const;

 private:
  std::vector<double> support_;
  std::vector<double> mass_;
};

/// True types of n agents.
class Population {
 public:
  explicit Population(std::vector<double> types);

  const std::vector<double>& types() const { return types_; }
  std::size_t n() const { return types_.size(); }
  DiscreteDistribution distribution() const;
  std::map<double, int> histogram() const;

 private:
  std::vector<double> types_;
};

/// Reports of n agents.
class ReportProfile {
 public:
  explicit ReportProfile(std::vector<double> reports);
  static ReportProfile truthful(const Population& pop) { return ReportProfile(pop.types()); }

  const std::vector<double>& reports() const { return reports_; }
  std::size_t n() const { return reports_.size(); }
  std::map<double, int> histogram() const;

 private:
  std::vector<double> reports_;
};

/// Performance distribution T around a mean t, used for noisy verification.
class PerformanceModel {
 public:
  enum class Kind { deterministic, two_point, bernoulli_scaled, sampler };
  using Sampler = std::function<double(double mean, std::mt19937_64& rng)>;

  static PerformanceModel deterministic();
  /// Mass 1/2 on t-d' and t+d' with d' = min(delta, t, 1-t).
  static PerformanceModel two_point(double delta);
  /// 1 with probability t, 0 otherwise.
  static PerformanceModel bernoulli_scaled();
  /// Sample-only model with no enumerable support.
  static PerformanceModel sampler(Sampler fn);

  Kind kind() const { return kind_; }
  double delta() const { return delta_; }
  bool finite_support() const { return kind_ != Kind::sampler; }

  /// (value, probability) pairs with expectation t. Throws for sampler models.
  std::vector<std::pair<double, double>> support(double t) const;
  double sample(double t, std::mt19937_64& rng) const;

 private:
  PerformanceModel(Kind kind, double delta, Sampler fn)
      : kind_(kind), delta_(delta), sampler_(std::move(fn)) {}

  Kind kind_;
  double delta_ = 0.0;
  Sampler sampler_;
};

/// A verification mechanism: an audit probability plus a grading rule.
///
/// Instances are immutable once built. Use Mechanism::create so that the
/// declared mean sufficiency is checked.
struct Mechanism {
  using VerifyFn = std::function<double(double report)>;
  using UnverifiedFn = std::function<double(double report)>;
  using VerifiedFn = std::function<double(double report, double sample)>;

  std::string name;
  VerifyFn verify_prob;
  UnverifiedFn grade_unverified;
  VerifiedFn grade_verified;
  double penalty_floor = 0.0;
  /// grade_verified is affine in the sample, so expectations only need the mean.
  bool mean_sufficient = false;
  /// Parameters outside the runnable range (audit probability may exceed 1).
  bool analysis_only = false;
  /// Reports where the mechanism is discontinuous; strategy grids refine around them.
  std::vector<double> critical_points;

  static Mechanism create(std::string name, VerifyFn verify, UnverifiedFn unverified,
                          VerifiedFn verified, double penalty_floor, bool mean_sufficient,
                          std::vector<double> critical_points = {});
};

/// True iff f(report, .) is affine on three probe samples (collinearity).
bool is_affine_in_sample(const Mechanism::VerifiedFn& f, double report);

struct GradeOutcome {
  bool verified = false;
  std::optional<double> sample;
  double grade = 0.0;
};

/// Expected grade of a type-true_t agent who reports `report`.
double expected_grade(const Mechanism& mech, double true_t, double report,
                      const PerformanceModel& perf);

/// Runs the mechanism once on every agent. Deterministic given the seed.
std::vector<GradeOutcome> run_mechanism(const Mechanism& mech, const Population& pop,
                                        const ReportProfile& profile, std::uint64_t seed,
                                        const PerformanceModel& perf);

/// Per-agent variant: agent i faces mechs[i].
std::vector<GradeOutcome> run_mechanism(std::span<const Mechanism> mechs, const Population& pop,
                                        const ReportProfile& profile, std::uint64_t seed,
                                        const PerformanceModel& perf);

/// Uniform double in [0,1) from the top 53 bits of the engine output.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace verimech

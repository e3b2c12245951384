#include "verimech/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace verimech {

namespace {

void require_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0,1], got " + std::to_string(x));
  }
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> support, std::vector<double> mass)
    : support_(std::move(support)), mass_(std::move(mass)) {
  if (support_.empty()) throw std::invalid_argument("distribution support is empty");
  if (support_.size() != mass_.size()) {
    throw std::invalid_argument("support and mass have different lengths");
  }
  for (std::size_t i = 0; i < support_.size(); ++i) {
    require_unit(support_[i], "support value");
    if (i > 0 && !(support_[i] > support_[i - 1])) {
      throw std::invalid_argument("support must be strictly increasing");
    }
    if (!(mass_[i] >= 0.0)) throw std::invalid_argument("mass must be non-negative");
  }
  const double total = std::accumulate(mass_.begin(), mass_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("masses must sum to 1, got " + std::to_string(total));
  }
}

DiscreteDistribution DiscreteDistribution::empirical(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empirical distribution of no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> support;
  std::vector<double> mass;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    support.push_back(sorted[i]);
    mass.push_back(static_cast<double>(j - i) / n);
    i = j;
  }
  return {std::move(support), std::move(mass)};
}

DiscreteDistribution DiscreteDistribution::uniform_grid(int m) {
  if (m < 2) throw std::invalid_argument("uniform grid needs at least 2 points");
  std::vector<double> support(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) support[static_cast<std::size_t>(i)] = static_cast<double>(i) / (m - 1);
  return {std::move(support), std::vector<double>(static_cast<std::size_t>(m), 1.0 / m)};
}

DiscreteDistribution DiscreteDistribution::point_mass(double t) { return {{t}, {1.0}}; }

double DiscreteDistribution::t_min() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (mass_[i] > 0.0) return support_[i];
  }
  return support_.front();
}

double DiscreteDistribution::t_max() const {
  for (std::size_t i = size(); i-- > 0;) {
    if (mass_[i] > 0.0) return support_[i];
  }
  return support_.back();
}

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m += mass_[i] * support_[i];
  return m;
}

double DiscreteDistribution::variance() const {
  const double mu = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < size(); ++i) v += mass_[i] * (support_[i] - mu) * (support_[i] - mu);
  return v;
}

double DiscreteDistribution::mass_at(double t) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), t);
  if (it == support_.end() || *it != t) return 0.0;
  return mass_[static_cast<std::size_t>(it - support_.begin())];
}

Population::Population(std::vector<double> types) : types_(std::move(types)) {
  if (types_.empty()) throw std::invalid_argument("population needs at least one agent");
  for (double t : types_) require_unit(t, "type");
}

DiscreteDistribution Population::distribution() const {
  return DiscreteDistribution::empirical(types_);
}

std::map<double, int> Population::histogram() const {
  std::map<double, int> h;
  for (double t : types_) ++h[t];
  return h;
}

ReportProfile::ReportProfile(std::vector<double> reports) : reports_(std::move(reports)) {
  for (double r : reports_) require_unit(r, "report");
}

std::map<double, int> ReportProfile::histogram() const {
  std::map<double, int> h;
  for (double r : reports_) ++h[r];
  return h;
}

PerformanceModel PerformanceModel::deterministic() { return {Kind::deterministic, 0.0, {}}; }

PerformanceModel PerformanceModel::two_point(double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("two_point delta must be non-negative");
  return {Kind::two_point, delta, {}};
}

PerformanceModel PerformanceModel::bernoulli_scaled() { return {Kind::bernoulli_scaled, 0.0, {}}; }

PerformanceModel PerformanceModel::sampler(Sampler fn) {
  if (!fn) throw std::invalid_argument("sampler performance model needs a function");
  return {Kind::sampler, 0.0, std::move(fn)};
}

std::vector<std::pair<double, double>> PerformanceModel::support(double t) const {
  require_unit(t, "performance mean");
  switch (kind_) {
    case Kind::deterministic:
      return {{t, 1.0}};
    case Kind::two_point: {
      const double d = std::min({delta_, t, 1.0 - t});
      if (d == 0.0) return {{t, 1.0}};
      return {{t - d, 0.5}, {t + d, 0.5}};
    }
    case Kind::bernoulli_scaled:
      return {{0.0, 1.0 - t}, {1.0, t}};
    case Kind::sampler:
      break;
  }
  throw std::logic_error("sampler performance model has no enumerable support");
}

double PerformanceModel::sample(double t, std::mt19937_64& rng) const {
  switch (kind_) {
    case Kind::deterministic:
      return t;
    case Kind::two_point: {
      const double d = std::min({delta_, t, 1.0 - t});
      return uniform01(rng) < 0.5 ? t - d : t + d;
    }
    case Kind::bernoulli_scaled:
      return uniform01(rng) < t ? 1.0 : 0.0;
    case Kind::sampler:
      return sampler_(t, rng);
  }
  return t;
}

bool is_affine_in_sample(const Mechanism::VerifiedFn& f, double report) {
  const double a = f(report, 0.0);
  const double b = f(report, 0.5);
  const double c = f(report, 1.0);
  const double scale = 1.0 + std::abs(a) + std::abs(b) + std::abs(c);
  return std::abs(b - 0.5 * (a + c)) <= 1e-9 * scale;
}

Mechanism Mechanism::create(std::string name, VerifyFn verify, UnverifiedFn unverified,
                            VerifiedFn verified, double penalty_floor, bool mean_sufficient,
                            std::vector<double> critical_points) {
  if (!verify || !unverified || !verified) {
    throw std::invalid_argument("mechanism " + name + " is missing a component");
  }
  if (!(penalty_floor >= 0.0)) throw std::invalid_argument("penalty floor must be non-negative");
  if (mean_sufficient) {
    for (double r : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      if (!is_affine_in_sample(verified, r)) {
        throw std::invalid_argument("mechanism " + name +
                                    " declared mean-sufficient but its verified grade is not "
                                    "affine in the sample");
      }
    }
  }
  Mechanism m;
  m.name = std::move(name);
  m.verify_prob = std::move(verify);
  m.grade_unverified = std::move(unverified);
  m.grade_verified = std::move(verified);
  m.penalty_floor = penalty_floor;
  m.mean_sufficient = mean_sufficient;
  m.critical_points = std::move(critical_points);
  return m;
}

double expected_grade(const Mechanism& mech, double true_t, double report,
                      const PerformanceModel& perf) {
  require_unit(true_t, "true type");
  require_unit(report, "report");
  if (!mech.mean_sufficient && !perf.finite_support()) {
    throw std::invalid_argument("mechanism " + mech.name +
                                " is not mean-sufficient and the performance model has no "
                                "finite support");
  }
  const double q = mech.verify_prob(report);
  double verified = 0.0;
  if (q != 0.0) {
    if (mech.mean_sufficient) {
      verified = mech.grade_verified(report, true_t);
    } else {
      for (const auto& [s, w] : perf.support(true_t)) verified += w * mech.grade_verified(report, s);
    }
  }
  if (q == 1.0) return verified;
  const double unverified = mech.grade_unverified(report);
  // Exact when both outcomes give the same grade.
  return unverified + q * (verified - unverified);
}

std::vector<GradeOutcome> run_mechanism(std::span<const Mechanism> mechs, const Population& pop,
                                        const ReportProfile& profile, std::uint64_t seed,
                                        const PerformanceModel& perf) {
  if (profile.n() != pop.n()) throw std::invalid_argument("profile length differs from population");
  if (mechs.size() != pop.n()) throw std::invalid_argument("need one mechanism per agent");
  std::mt19937_64 rng(seed);
  std::vector<GradeOutcome> out(pop.n());
  for (std::size_t i = 0; i < pop.n(); ++i) {
    const Mechanism& mech = mechs[i];
    if (mech.analysis_only) {
      throw std::invalid_argument("mechanism " + mech.name + " is analysis-only and cannot run");
    }
    const double report = profile.reports()[i];
    const double q = mech.verify_prob(report);
    GradeOutcome& o = out[i];
    o.verified = uniform01(rng) < q;
    if (o.verified) {
      o.sample = perf.sample(pop.types()[i], rng);
      o.grade = mech.grade_verified(report, *o.sample);
    } else {
      o.grade = mech.grade_unverified(report);
    }
  }
  return out;
}

std::vector<GradeOutcome> run_mechanism(const Mechanism& mech, const Population& pop,
                                        const ReportProfile& profile, std::uint64_t seed,
                                        const PerformanceModel& perf) {
  std::vector<Mechanism> mechs(pop.n(), mech);
  return run_mechanism(mechs, pop, profile, seed, perf);
}

}  // namespace verimech

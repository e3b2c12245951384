#include "verimech/mechanisms.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "verimech/metrics.hpp"
#include "verimech/scoring.hpp"

namespace verimech {

namespace {

bool matches(double s, double report) { return std::abs(s - report) <= kSampleMatchTol; }

}  // namespace

Mechanism make_verify_all() {
  return Mechanism::create(
      "verify-all", [](double) { return 1.0; }, [](double r) { return r; },
      [](double r, double s) { return matches(s, r) ? r : 0.0; }, 0.0, false);
}

Mechanism make_pay_all() {
  return Mechanism::create(
      "pay-all", [](double) { return 0.0; }, [](double) { return 1.0; },
      [](double, double) { return 1.0; }, 0.0, true);
}

Mechanism make_huge_penalty(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("huge-penalty eps must be in (0,1]");
  const double penalty = 2.0 / eps;
  return Mechanism::create(
      "huge-penalty", [eps](double) { return eps; }, [](double r) { return r; },
      [penalty](double r, double s) { return matches(s, r) ? r : -penalty; }, penalty, false);
}

Mechanism make_mcv(const McvParams& p) {
  if (!(p.gamma >= 0.0 && p.gamma <= 1.0)) throw std::invalid_argument("mcv gamma must be in [0,1]");
  if (!(p.xi >= 0.0)) throw std::invalid_argument("mcv xi must be non-negative");
  const double gamma = p.gamma;
  const double xi = p.xi;
  return Mechanism::create(
      "mcv",
      [gamma, xi](double r) { return r > gamma ? (r - gamma) / (r + xi) : 0.0; },
      [gamma](double r) { return r > gamma ? r : gamma; },
      [xi](double r, double s) { return matches(s, r) ? r : -xi; }, xi, false, {gamma});
}

DiscreteDistribution leave_one_out(const ReportProfile& profile, std::size_t i) {
  if (profile.n() < 2) throw std::invalid_argument("leave-one-out needs at least 2 agents");
  std::vector<double> others;
  others.reserve(profile.n() - 1);
  for (std::size_t j = 0; j < profile.n(); ++j) {
    if (j != i) others.push_back(profile.reports()[j]);
  }
  return DiscreteDistribution::empirical(others);
}

std::vector<McvParams> asmcv_assign(double beta, const ReportProfile& profile, double xi) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("as-mcv beta must be in [0,1]");
  if (profile.n() < 2) throw std::invalid_argument("as-mcv needs at least 2 agents");
  const double n = static_cast<double>(profile.n());
  const double scaled = n / (n - 1.0) * beta;
  // Agents with equal reports see the same leave-one-out distribution.
  std::map<double, double> cutoff_by_report;
  std::vector<McvParams> out(profile.n());
  for (std::size_t i = 0; i < profile.n(); ++i) {
    const double r = profile.reports()[i];
    auto it = cutoff_by_report.find(r);
    if (it == cutoff_by_report.end()) {
      it = cutoff_by_report.emplace(r, gamma_of_beta(scaled, leave_one_out(profile, i))).first;
    }
    out[i] = {it->second, xi};
  }
  return out;
}

Mechanism make_lv() {
  return Mechanism::create(
      "lv", [](double r) { return r; }, [](double r) { return 0.25 + r; },
      [](double, double s) { return 2.0 * s - 0.75; }, 0.75, true);
}

double pv_constant(int kappa) {
  const double k = kappa;
  return std::pow(k / (k + 1.0), k) / (k + 1.0);
}

double pv_min_grade(const PvParams& p) {
  return pv_constant(p.kappa) - 1.0 / (p.kappa * std::pow(p.theta, p.kappa + 1));
}

Mechanism make_pv(const PvParams& p, bool analysis_mode) {
  if (p.kappa < 1) throw std::invalid_argument("pv kappa must be >= 1");
  if (!(p.theta > 0.0)) throw std::invalid_argument("pv theta must be positive");
  if (p.theta > 1.0 && !analysis_mode) {
    throw std::invalid_argument("pv theta > 1 requires analysis mode");
  }
  const int kappa = p.kappa;
  const double theta = p.theta;
  const double c = pv_constant(kappa);
  const double inv_k = 1.0 / kappa;
  const double scale = 1.0 / (kappa * std::pow(theta, kappa + 1));
  auto root = [inv_k](double r) { return r == 0.0 ? 0.0 : std::pow(r, inv_k); };

  Mechanism m = Mechanism::create(
      "pv", [theta, root](double r) { return theta * root(r); },
      [c, scale, theta, kappa, root](double r) {
        const double base = theta * root(r);
        double sum = 0.0;
        double term = 1.0;
        for (int l = 1; l <= kappa; ++l) {
          term *= base;
          sum += term;
        }
        return c + scale * sum;
      },
      [c, scale, theta, inv_k](double, double s) { return c + (1.0 + inv_k) * s / theta - scale; },
      std::max(0.0, -pv_min_grade(p)), true);
  m.analysis_only = theta > 1.0;
  return m;
}

double theta_star(double xi, int kappa) {
  if (!(xi >= 0.0)) throw std::invalid_argument("theta_star xi must be non-negative");
  if (kappa < 1) throw std::invalid_argument("theta_star kappa must be >= 1");
  const double k = kappa;
  return std::pow(std::pow(1.0 + 1.0 / k, -(k + 1.0)) + k * xi, -1.0 / (k + 1.0));
}

int HistogramParams::kappa() const {
  return static_cast<int>(std::ceil(2.0 / (alpha - 1.0)));
}

std::vector<double> HistogramParams::type_grid() const {
  std::vector<double> grid;
  grid.reserve(reference_histogram.size());
  for (const auto& [t, count] : reference_histogram) grid.push_back(t);
  return grid;
}

void HistogramParams::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("histogram epsilon must be positive");
  if (!(alpha > 1.0 && alpha < 1.0 + epsilon)) {
    throw std::invalid_argument("histogram alpha must lie in (1, 1+epsilon)");
  }
  if (reference_histogram.empty()) throw std::invalid_argument("reference histogram is empty");
  double prev = -1.0;
  bool first = true;
  int total = 0;
  for (const auto& [t, count] : reference_histogram) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("histogram type outside [0,1]");
    if (count < 0) throw std::invalid_argument("histogram counts must be non-negative");
    if (!first && !(t - prev > epsilon)) {
      throw std::invalid_argument("histogram types must be separated by more than epsilon");
    }
    prev = t;
    first = false;
    total += count;
  }
  if (total == 0) throw std::invalid_argument("reference histogram has no agents");
  if (!(kappa() > 2.0 / epsilon)) throw std::invalid_argument("histogram kappa must exceed 2/epsilon");
}

HistogramMechanism make_histogram(const HistogramParams& p, const ReportProfile& profile) {
  p.validate();
  const std::vector<double> grid = p.type_grid();
  std::map<double, int> reported;
  for (double t : grid) reported[t] = 0;

  int total = 0;
  for (const auto& [t, count] : p.reference_histogram) total += count;
  if (profile.n() != static_cast<std::size_t>(total)) {
    throw std::invalid_argument("profile size differs from the reference histogram total");
  }

  std::vector<double> snapped(profile.n());
  for (std::size_t i = 0; i < profile.n(); ++i) {
    const double r = profile.reports()[i];
    bool found = false;
    for (double t : grid) {
      if (std::abs(t - r) <= kSampleMatchTol) {
        snapped[i] = t;
        ++reported[t];
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::invalid_argument("report " + std::to_string(r) + " is off the type grid");
    }
  }

  HistogramMechanism out;
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
    if (reported[*it] > p.reference_histogram.at(*it)) {
      out.violating_type = *it;
      break;
    }
  }
  out.verified.resize(profile.n());
  for (std::size_t i = 0; i < profile.n(); ++i) {
    out.verified[i] = out.violating_type && snapped[i] == *out.violating_type;
  }

  const double eps = p.epsilon;
  const double a = 1.0 + 1.0 / p.kappa();
  const std::optional<double> tv = out.violating_type;
  out.mechanism = Mechanism::create(
      "histogram",
      [tv](double r) { return tv && std::abs(r - *tv) <= kSampleMatchTol ? 1.0 : 0.0; },
      [eps](double r) { return eps + r; },
      [eps, a](double r, double s) { return eps + scoring_rule(a, r, s); }, 0.0, true, grid);
  return out;
}

}  // namespace verimech

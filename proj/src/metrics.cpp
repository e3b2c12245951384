#include "verimech/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "verimech/mechanisms.hpp"

namespace verimech {

double bias_fn(double gamma, const DiscreteDistribution& p) {
  double b = 0.0;
  for (std::size_t i = 0; i < p.size() && p.support()[i] <= gamma; ++i) {
    b += p.mass()[i] * (gamma - p.support()[i]);
  }
  return b;
}

double ver_fn(double gamma, double xi, const DiscreteDistribution& p) {
  double v = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = p.support()[i];
    // Same association as p(t) * q(t) so MCV metrics match bit for bit.
    if (t > gamma) v += p.mass()[i] * ((t - gamma) / (t + xi));
  }
  return v;
}

double gamma_of_beta(double beta, const DiscreteDistribution& p) {
  if (!(beta >= 0.0)) throw std::invalid_argument("gamma_of_beta needs beta >= 0");
  if (bias_fn(1.0, p) <= beta) return 1.0;

  const auto& xs = p.support();
  const auto& ws = p.mass();
  double cum_mass = 0.0;
  double cum_moment = 0.0;
  double gamma = 1.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    cum_mass += ws[j];
    cum_moment += ws[j] * xs[j];
    const double next = j + 1 < xs.size() ? xs[j + 1] : 1.0;
    // On [xs[j], next] the bias is cum_mass * gamma - cum_moment.
    if (cum_mass * next - cum_moment > beta) {
      gamma = std::clamp((beta + cum_moment) / cum_mass, xs[j], next);
      break;
    }
  }
  // Rounding can put the closed form a few ulps past the crossing.
  while (gamma > 0.0 && bias_fn(gamma, p) > beta) {
    gamma = std::nextafter(gamma, -std::numeric_limits<double>::infinity());
  }
  return gamma;
}

double mech_ver(const Mechanism& mech, const DiscreteDistribution& p) {
  double v = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.mass()[i] > 0.0) v += p.mass()[i] * mech.verify_prob(p.support()[i]);
  }
  return v;
}

double mech_bias(const Mechanism& mech, const DiscreteDistribution& p,
                 const PerformanceModel& perf) {
  double b = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = p.support()[i];
    if (p.mass()[i] > 0.0) b += p.mass()[i] * (expected_grade(mech, t, t, perf) - t);
  }
  return b;
}

double mech_maxbias(const Mechanism& mech, const DiscreteDistribution& p,
                    const PerformanceModel& perf) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = p.support()[i];
    if (p.mass()[i] > 0.0) worst = std::max(worst, expected_grade(mech, t, t, perf) - t);
  }
  return worst;
}

BiasVer asmcv_metrics(double beta, const Population& pop, double xi) {
  if (pop.n() < 2) throw std::invalid_argument("as-mcv metrics need at least 2 agents");
  const auto cutoffs = asmcv_assign(beta, ReportProfile::truthful(pop), xi);
  const double n = static_cast<double>(pop.n());
  BiasVer out;
  for (std::size_t i = 0; i < pop.n(); ++i) {
    const double t = pop.types()[i];
    const double g = cutoffs[i].gamma;
    if (g >= t) {
      out.bias += (g - t) / n;
    } else {
      out.ver += (t - g) / (t + xi) / n;
    }
  }
  return out;
}

std::vector<double> gamma_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("gamma step must be in (0,1]");
  const double k = std::round(1.0 / step);
  if (std::abs(k * step - 1.0) > 1e-9) throw std::invalid_argument("gamma step must divide 1");
  const int count = static_cast<int>(k);
  std::vector<double> grid(static_cast<std::size_t>(count) + 1);
  for (int i = 0; i <= count; ++i) grid[static_cast<std::size_t>(i)] = i / k;
  return grid;
}

std::vector<int> default_kappas() {
  std::vector<int> ks;
  for (int k = 1; k <= 15; ++k) ks.push_back(k);
  ks.push_back(20);
  ks.push_back(50);
  return ks;
}

namespace {

CurvePoint mcv_point(const DiscreteDistribution& p, double xi, double gamma) {
  return {gamma, bias_fn(gamma, p), ver_fn(gamma, xi, p), false};
}

CurvePoint pv_point(const DiscreteDistribution& p, double xi, int kappa) {
  const double ts = theta_star(xi, kappa);
  const bool clipped = ts > 1.0;
  const Mechanism m = make_pv({std::min(ts, 1.0), kappa});
  return {static_cast<double>(kappa), mech_bias(m, p), mech_ver(m, p), clipped};
}

void check_kappas(const std::vector<int>& kappas) {
  for (int k : kappas) {
    if (k < 1) throw std::invalid_argument("kappa values must be >= 1");
  }
}

}  // namespace

Curve sweep_mcv(const DiscreteDistribution& p, double xi, double gamma_step) {
  const auto grid = gamma_grid(gamma_step);
  Curve c;
  c.points.resize(grid.size());
  const auto count = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) {
    c.points[static_cast<std::size_t>(i)] = mcv_point(p, xi, grid[static_cast<std::size_t>(i)]);
  }
  return c;
}

Curve sweep_mcv_serial(const DiscreteDistribution& p, double xi, double gamma_step) {
  Curve c;
  for (double g : gamma_grid(gamma_step)) c.points.push_back(mcv_point(p, xi, g));
  return c;
}

Curve sweep_pv(const DiscreteDistribution& p, double xi, const std::vector<int>& kappas) {
  check_kappas(kappas);
  std::vector<int> sorted = kappas;
  std::sort(sorted.begin(), sorted.end());
  Curve c;
  c.points.resize(sorted.size());
  const auto count = static_cast<long>(sorted.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    c.points[static_cast<std::size_t>(i)] = pv_point(p, xi, sorted[static_cast<std::size_t>(i)]);
  }
  return c;
}

Curve sweep_pv_serial(const DiscreteDistribution& p, double xi, const std::vector<int>& kappas) {
  check_kappas(kappas);
  std::vector<int> sorted = kappas;
  std::sort(sorted.begin(), sorted.end());
  Curve c;
  for (int k : sorted) c.points.push_back(pv_point(p, xi, k));
  return c;
}

}  // namespace verimech

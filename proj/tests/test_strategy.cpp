#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "verimech/data.hpp"
#include "verimech/mechanisms.hpp"
#include "verimech/strategy.hpp"

using namespace verimech;
using fixtures::half_audit_mcv;
using fixtures::inverted_mcv;

namespace {

const PerformanceModel kDet = PerformanceModel::deterministic();

// a * grade + b for every outcome.
Mechanism rescaled(const Mechanism& m, double a, double b) {
  return Mechanism::create(
      m.name + "-rescaled", m.verify_prob, [m, a, b](double r) { return a * m.grade_unverified(r) + b; },
      [m, a, b](double r, double s) { return a * m.grade_verified(r, s) + b; }, a * m.penalty_floor - b,
      m.mean_sufficient, m.critical_points);
}

}  // namespace

TEST_CASE("scoring rule") {
  CHECK(scoring_rule(2.0, 0.5, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(scoring_rule(1.1, 0.0, 0.7) == 0.0);
  for (double alpha : {1.05, 1.1, 1.5, 2.0, 3.0}) {
    for (int i = 0; i <= 100; ++i) {
      const double t = i / 100.0;
      CHECK(scoring_rule(alpha, t, t) == doctest::Approx(std::pow(t, alpha)).epsilon(1e-12));
    }
  }
}

TEST_CASE("expected scoring rule is maximized at the mean") {
  const std::vector<PerformanceModel> perfs = {kDet, PerformanceModel::two_point(0.2),
                                               PerformanceModel::bernoulli_scaled()};
  for (double alpha : {1.1, 1.5, 2.0, 3.0}) {
    for (const auto& perf : perfs) {
      for (int i = 0; i <= 200; i += 8) {
        const double t = i / 200.0;
        double best_x = -1.0;
        double best = -1e300;
        for (int j = 0; j <= 200; ++j) {
          const double x = j / 200.0;
          double v = 0.0;
          for (auto [s, w] : perf.support(t)) v += w * scoring_rule(alpha, x, s);
          if (v > best + 1e-15) {
            best = v;
            best_x = x;
          }
        }
        CHECK(best_x == doctest::Approx(t));
      }
    }
  }
}

TEST_CASE("report grids") {
  const auto g = make_report_grid(0.25);
  CHECK(g == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  const std::vector<double> extra = {0.3, 0.5};
  CHECK(make_report_grid(0.5, extra) == std::vector<double>{0.0, 0.3, 0.5, 1.0});
  const auto d = default_report_grid(make_mcv({0.4, 0.0}));
  CHECK(std::binary_search(d.begin(), d.end(), 0.4 + 1e-6));
  CHECK(std::binary_search(d.begin(), d.end(), 0.4 - 1e-6));
  CHECK(d.size() >= 1001);
}

TEST_CASE("best_response examples") {
  const auto grid = make_report_grid(0.001);
  const auto br = best_response(make_mcv({0.5, 0.0}), 0.3, grid, kDet);
  CHECK(br.report == 0.3);
  CHECK(br.gain == 0.0);
  for (int i = 0; i <= 20; ++i) {
    const double t = i / 20.0;
    const auto lv = best_response(make_lv(), t, grid, kDet);
    CHECK(lv.report == doctest::Approx(t));
    CHECK(lv.gain == 0.0);
    const auto pa = best_response(make_pay_all(), t, grid, kDet);
    CHECK(pa.report == doctest::Approx(t));
    CHECK(pa.gain == 0.0);
  }
}

TEST_CASE("check_truthful on built-in mechanisms") {
  const auto types = make_report_grid(0.01);
  std::vector<Mechanism> mechs = {make_verify_all(), make_pay_all(), make_huge_penalty(0.1), make_lv()};
  for (int g = 0; g <= 100; g += 10) {
    for (double xi : {0.0, 1.0, 4.0}) mechs.push_back(make_mcv({g / 100.0, xi}));
  }
  for (int k : {1, 2, 3, 10, 50}) {
    for (double xi : {0.0, 1.0, 4.0}) mechs.push_back(make_pv({std::min(theta_star(xi, k), 1.0), k}));
  }
  for (const auto& m : mechs) {
    INFO(m.name);
    CHECK(check_truthful(m, types, default_report_grid(m, types), kDet).empty());
  }
  for (const auto& m : {make_lv(), make_pv({0.8, 4})}) {
    for (const auto& perf : {PerformanceModel::two_point(0.3), PerformanceModel::bernoulli_scaled()}) {
      CHECK(check_truthful(m, types, default_report_grid(m, types), perf).empty());
    }
  }
}

TEST_CASE("check_truthful finds the broken fixtures") {
  const auto types = make_report_grid(0.01);
  for (const auto& m : {inverted_mcv(0.5), half_audit_mcv(0.3, 0.0), half_audit_mcv(0.6, 2.0)}) {
    const auto v = check_truthful(m, types, default_report_grid(m, types), kDet);
    INFO(m.name);
    REQUIRE_FALSE(v.empty());
    for (const auto& r : v) {
      CHECK(r.kind == ViolationKind::manipulation);
      CHECK(r.magnitude > kProfitTol);
      CHECK(expected_grade(m, r.agent_type, r.report, kDet) >
            expected_grade(m, r.agent_type, r.agent_type, kDet) + kProfitTol);
    }
  }
  const auto v = check_truthful(inverted_mcv(0.5), std::vector<double>{0.0}, make_report_grid(0.001), kDet);
  REQUIRE(v.size() == 1);
  CHECK(v[0].report == 1.0);
  CHECK(v[0].magnitude == doctest::Approx(1.0));
}

TEST_CASE("check_validity") {
  const auto p = DiscreteDistribution::uniform_grid(101);
  SUBCASE("mcv is valid under exact verification") {
    for (int g = 0; g <= 100; g += 5) {
      for (double xi : {0.0, 0.75, 2.0}) CHECK(check_validity(make_mcv({g / 100.0, xi}), p, xi, kDet, true).empty());
    }
  }
  SUBCASE("mcv punishes truthful agents under noise") {
    const auto v = check_validity(make_mcv({0.3, 1.0}), p, 1.0, PerformanceModel::two_point(0.1), false);
    bool found = false;
    for (const auto& r : v) found = found || r.kind == ViolationKind::negative_bias;
    CHECK(found);
  }
  SUBCASE("lv needs a budget of 3/4") {
    const auto noisy = PerformanceModel::two_point(0.1);
    CHECK(check_validity(make_lv(), p, 0.75, noisy, false).empty());
    const auto v = check_validity(make_lv(), p, 0.5, noisy, false);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ViolationKind::floor_breach);
    CHECK(v[0].magnitude == doctest::Approx(0.25));
    CHECK(to_string(v[0].kind) == "HR3");
  }
  SUBCASE("lv only promises the expected grade") {
    // A verified truthful agent of type t < 3/4 realizes 2t - 3/4 < t.
    const auto v = check_validity(make_lv(), p, 0.75, kDet, true);
    CHECK(v.size() == 74);
    for (const auto& r : v) {
      CHECK(r.kind == ViolationKind::punished_truth);
      CHECK(r.agent_type < 0.75);
      CHECK(r.magnitude == doctest::Approx(0.75 - r.agent_type));
    }
  }
  SUBCASE("pv floor condition") {
    for (int k = 1; k <= 6; ++k) {
      for (double theta : {0.3, 0.6, 0.9, 1.0}) {
        const double need = 1.0 / (k * std::pow(theta, k + 1)) - pv_constant(k);
        for (double xi : {0.0, 0.5, 1.0, 2.0, 5.0, 20.0}) {
          if (std::abs(need - xi) < 1e-6) continue;
          const bool hr3 = check_validity(make_pv({theta, k}), p, xi, PerformanceModel::two_point(0.1), false).empty();
          CHECK(hr3 == (need <= xi));
        }
      }
    }
  }
  SUBCASE("huge penalty punishes truthful agents under noise") {
    const auto v = check_validity(make_huge_penalty(0.2), p, 10.0, PerformanceModel::two_point(0.1), false);
    CHECK_FALSE(v.empty());
  }
}

TEST_CASE("truthful mcv grades are max(t, gamma) in every outcome") {
  for (int g = 0; g <= 100; g += 5) {
    const double gamma = g / 100.0;
    const auto m = make_mcv({gamma, 1.0});
    for (int i = 0; i <= 100; ++i) {
      const double t = i / 100.0;
      const double q = m.verify_prob(t);
      if (q < 1.0) CHECK(m.grade_unverified(t) == std::max(t, gamma));
      if (q > 0.0) CHECK(m.grade_verified(t, t) == std::max(t, gamma));
    }
  }
}

TEST_CASE("best responses survive positive affine rescaling") {
  const auto grid = make_report_grid(0.005);
  for (const auto& m : {make_lv(), make_pv({0.7, 3}), make_pv({1.0, 8})}) {
    const auto s = rescaled(m, 2.5, -0.3);
    for (int i = 0; i <= 40; ++i) {
      const double t = i / 40.0;
      for (const auto& perf : {kDet, PerformanceModel::two_point(0.2)}) {
        CHECK(best_response(m, t, grid, perf).report == best_response(s, t, grid, perf).report);
      }
    }
  }
}

TEST_CASE("verified grades are non-decreasing in the sample") {
  const auto grid = make_report_grid(0.01);
  for (const auto& m : {make_pay_all(), make_lv(), make_pv({0.5, 5}), make_pv({1.0, 20})}) {
    INFO(m.name);
    CHECK(verified_grade_monotone(m, grid));
  }
  // Exact-match mechanisms drop to the penalty on any s != r, so they are not
  // monotone; under exact verification s == t and underperforming is impossible.
  CHECK_FALSE(verified_grade_monotone(make_mcv({0.3, 1.0}), grid));
  const auto bad = Mechanism::create(
      "broken-decreasing", [](double) { return 1.0; }, [](double r) { return r; },
      [](double, double s) { return 1.0 - s; }, 0.0, true);
  CHECK_FALSE(verified_grade_monotone(bad, grid));
}

TEST_CASE("naive scoring fails unless everyone is audited") {
  const auto half = naive_failure_demo([](double) { return 0.5; }, 0.25, 0.001);
  REQUIRE(half.has_value());
  CHECK(half->kind == ViolationKind::manipulation);
  CHECK(half->report > half->agent_type);
  CHECK_FALSE(naive_failure_demo([](double) { return 1.0; }, 0.25, 0.001).has_value());
  CHECK_FALSE(naive_failure_demo([](double) { return 1.0; }, 5.0, 0.01).has_value());
  CHECK(naive_failure_demo([](double r) { return 1.0 - r; }, 0.0, 0.001).has_value());
  CHECK(naive_failure_demo([](double r) { return 0.2 + 0.8 * r; }, 0.1, 0.001).has_value());
  CHECK_THROWS_AS(naive_failure_demo([](double) { return 1.5; }, 0.0, 0.1), std::invalid_argument);
}

#include <doctest.h>

#include <cstdlib>
#include <random>

#include "random_instances.hpp"
#include "verimech/data.hpp"
#include "verimech/metrics.hpp"
#include "verimech/strategy.hpp"
#include "verimech/threads.hpp"

using namespace verimech;

namespace {

bool same(const Curve& a, const Curve& b) {
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const auto& x = a.points[i];
    const auto& y = b.points[i];
    if (x.param != y.param || x.bias != y.bias || x.ver != y.ver || x.flagged != y.flagged) return false;
  }
  return true;
}

bool same(const std::vector<ViolationReport>& a, const std::vector<ViolationReport>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].kind != b[i].kind || a[i].agent_type != b[i].agent_type || a[i].report != b[i].report ||
        a[i].magnitude != b[i].magnitude) {
      return false;
    }
  }
  return true;
}

const int kThreadCounts[] = {1, 2, 3, 8};

}  // namespace

TEST_CASE("sweeps match the serial reference bit for bit") {
  const std::vector<DiscreteDistribution> dists = {DiscreteDistribution::uniform_grid(1001),
                                                   beta_discretize(5, 5, 2001), beta_discretize(0.5, 2, 777)};
  for (int threads : kThreadCounts) {
    set_threads(threads);
    for (const auto& p : dists) {
      for (double xi : {0.0, 1.0, 4.0}) {
        CHECK(same(sweep_mcv(p, xi, 0.01), sweep_mcv_serial(p, xi, 0.01)));
        CHECK(same(sweep_pv(p, xi, default_kappas()), sweep_pv_serial(p, xi, default_kappas())));
      }
    }
  }
}

TEST_CASE("check_truthful matches the serial reference") {
  const auto types = make_report_grid(0.01);
  const auto broken = Mechanism::create(
      "broken-half-audit", [](double r) { return r > 0.3 ? 0.5 * (r - 0.3) / r : 0.0; },
      [](double r) { return std::max(r, 0.3); },
      [](double r, double s) { return std::abs(s - r) <= 1e-9 ? r : 0.0; }, 0.0, false, {0.3});
  for (int threads : kThreadCounts) {
    set_threads(threads);
    for (const auto& m : {make_mcv({0.4, 1.0}), make_lv(), make_pv({0.6, 3}), broken}) {
      const auto grid = default_report_grid(m, types);
      const auto perf = PerformanceModel::deterministic();
      const auto par = check_truthful(m, types, grid, perf);
      CHECK(same(par, check_truthful_serial(m, types, grid, perf)));
      if (m.name == "broken-half-audit") CHECK_FALSE(par.empty());
    }
  }
}

TEST_CASE("nash enumeration matches the serial reference") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = testing::random_histogram_instance(rng, 5, 5);
    set_threads(kThreadCounts[trial % 4]);
    const auto a = nash_bruteforce(inst.params, inst.pop);
    const auto b = nash_bruteforce_serial(inst.params, inst.pop);
    CHECK(a.equilibria == b.equilibria);
    CHECK(a.verified_counts == b.verified_counts);
    CHECK(a.unique == b.unique);
    CHECK(a.truthful_is_equilibrium == b.truthful_is_equilibrium);
  }
}

TEST_CASE("naive failure demo matches the serial reference") {
  const std::vector<AuditFn> qs = {[](double) { return 0.5; }, [](double) { return 1.0; },
                                   [](double r) { return 1.0 - r; }};
  for (int threads : kThreadCounts) {
    set_threads(threads);
    for (const auto& q : qs) {
      const auto a = naive_failure_demo(q, 0.25, 0.005);
      const auto b = naive_failure_demo_serial(q, 0.25, 0.005);
      REQUIRE(a.has_value() == b.has_value());
      if (a) {
        CHECK(a->agent_type == b->agent_type);
        CHECK(a->report == b->report);
        CHECK(a->magnitude == b->magnitude);
      }
    }
  }
}

TEST_CASE("VERIMECH_THREADS") {
  const char* saved = std::getenv("VERIMECH_THREADS");
  const std::string restore = saved ? saved : "";

  set_threads(8);
  ::setenv("VERIMECH_THREADS", "3", 1);
  CHECK(thread_cap_from_env() == 3);
  CHECK(apply_thread_cap() == 3);
  CHECK(max_threads() == 3);
  for (const char* bad : {"0", "-2", "abc", "4x", ""}) {
    ::setenv("VERIMECH_THREADS", bad, 1);
    CHECK_FALSE(thread_cap_from_env().has_value());
  }
  ::unsetenv("VERIMECH_THREADS");
  CHECK_FALSE(thread_cap_from_env().has_value());

  if (saved) ::setenv("VERIMECH_THREADS", restore.c_str(), 1);
}

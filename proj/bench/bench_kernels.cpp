// Serial reference vs OpenMP kernels. Prints one CSV row per kernel:
// kernel,threads,serial_ms,parallel_ms,speedup,match

#include <fmt/core.h>

#include <chrono>
#include <functional>

#include "verimech/data.hpp"
#include "verimech/mechanisms.hpp"
#include "verimech/metrics.hpp"
#include "verimech/strategy.hpp"
#include "verimech/threads.hpp"

using namespace verimech;

namespace {

template <class F>
double time_ms(F&& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

bool same(const Curve& a, const Curve& b) {
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (a.points[i].bias != b.points[i].bias || a.points[i].ver != b.points[i].ver) return false;
  }
  return true;
}

void report(const char* name, double serial, double parallel, bool match) {
  fmt::print("{},{},{:.3f},{:.3f},{:.2f},{}\n", name, max_threads(), serial, parallel,
             serial / parallel, match ? "yes" : "NO");
}

}  // namespace

int main() {
  apply_thread_cap();
  fmt::print("kernel,threads,serial_ms,parallel_ms,speedup,match\n");

  {
    const auto p = beta_discretize(5, 5, 200000);
    Curve s, q;
    const double ts = time_ms([&] { s = sweep_mcv_serial(p, 0.0, 0.01); }, 3);
    const double tp = time_ms([&] { q = sweep_mcv(p, 0.0, 0.01); }, 3);
    report("sweep_mcv", ts, tp, same(s, q));
  }
  {
    const auto p = beta_discretize(10, 10, 20000);
    const auto ks = default_kappas();
    Curve s, q;
    const double ts = time_ms([&] { s = sweep_pv_serial(p, 1.0, ks); }, 3);
    const double tp = time_ms([&] { q = sweep_pv(p, 1.0, ks); }, 3);
    report("sweep_pv", ts, tp, same(s, q));
  }
  {
    const auto mech = make_mcv({0.4, 1.0});
    const auto types = make_report_grid(0.005);
    const auto grid = default_report_grid(mech);
    const auto perf = PerformanceModel::deterministic();
    std::size_t a = 0, b = 0;
    const double ts = time_ms([&] { a = check_truthful_serial(mech, types, grid, perf).size(); }, 3);
    const double tp = time_ms([&] { b = check_truthful(mech, types, grid, perf).size(); }, 3);
    report("check_truthful", ts, tp, a == b);
  }
  {
    HistogramParams params{1.05, 0.15, {{0.0, 1}, {0.2, 2}, {0.4, 1}, {0.6, 1}, {0.8, 1}, {1.0, 0}}};
    const Population pop({0.0, 0.2, 0.2, 0.4, 0.6, 0.8});
    NashResult s, q;
    const double ts = time_ms([&] { s = nash_bruteforce_serial(params, pop); }, 3);
    const double tp = time_ms([&] { q = nash_bruteforce(params, pop); }, 3);
    report("nash_bruteforce", ts, tp, s.equilibria == q.equilibria);
  }
  {
    auto q = [](double) { return 0.5; };
    std::optional<ViolationReport> s, p;
    const double ts = time_ms([&] { s = naive_failure_demo_serial(q, 0.25, 0.001); }, 1);
    const double tp = time_ms([&] { p = naive_failure_demo(q, 0.25, 0.001); }, 1);
    report("naive_failure_demo", ts, tp, s.has_value() == p.has_value());
  }
  return 0;
}

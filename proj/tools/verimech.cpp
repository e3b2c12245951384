// verimech: evaluate, sweep and certify grading mechanisms with costly verification.
//
// Exit codes: 0 success, 1 property violation found, 2 usage or input error.

#include <fmt/core.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cli_common.hpp"
#include "verimech/data.hpp"
#include "verimech/mechanisms.hpp"
#include "verimech/metrics.hpp"
#include "verimech/strategy.hpp"
#include "verimech/threads.hpp"

namespace {

using namespace verimech;
using verimech::cli::UsageError;

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

struct EvalArgs {
  std::string mech;
  std::string dist = "uniform:1001";
  double xi = 0.0;
  std::string perf = "deterministic";
};

struct SweepArgs {
  std::string family;
  std::string dist = "uniform:1001";
  std::vector<double> xis;
  std::string out;
  double gamma_step = 0.01;
  std::string kappas;
};

struct CheckArgs {
  std::string mech;
  std::string dist = "uniform:101";
  double xi = 0.0;
  std::string mode = "deterministic";
  std::string perf = "two_point:0.1";
};

struct SimulateArgs {
  std::string mech;
  std::string population;
  std::uint64_t seed = 0;
  std::string perf = "deterministic";
  double xi = 0.0;
  std::string out = "-";
};

struct NashArgs {
  double alpha = 1.1;
  double epsilon = 0.2;
  std::string population;
  std::string grid;
};

int run_eval(const EvalArgs& a) {
  const auto mech = cli::build_mechanism(cli::parse_mechanism_spec(a.mech), a.xi);
  const auto p = cli::parse_distribution(a.dist);
  const auto perf = cli::parse_performance(a.perf);
  fmt::print("bias {:.6f}\nver {:.6f}\nmaxbias {:.6f}\n", mech_bias(mech, p, perf), mech_ver(mech, p),
             mech_maxbias(mech, p, perf));
  return kOk;
}

int run_sweep(SweepArgs a) {
  if (a.family != "mcv" && a.family != "pv") throw UsageError("--family must be mcv or pv");
  if (a.xis.empty()) a.xis.push_back(0.0);
  if (a.xis.size() > 1 && a.out.find("{xi}") == std::string::npos) {
    throw UsageError("several --xi values need an --out path containing {xi}");
  }
  for (double xi : a.xis) {
    if (xi < 0.0) throw UsageError("--xi must be non-negative");
  }
  const auto p = cli::parse_distribution(a.dist);
  const auto kappas = a.kappas.empty() ? default_kappas() : cli::parse_int_list(a.kappas);

  for (double xi : a.xis) {
    Curve curve;
    try {
      curve = a.family == "mcv" ? sweep_mcv(p, xi, a.gamma_step) : sweep_pv(p, xi, kappas);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const std::string path = cli::expand_output_path(a.out, xi);
    if (path == "-") {
      cli::write_sweep_csv(std::cout, curve);
      continue;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    cli::write_sweep_csv(out, curve);
    if (!out) throw std::runtime_error("write failed for " + path);
    fmt::print(stderr, "wrote {} ({} rows)\n", path, curve.points.size());
  }
  return kOk;
}

int run_check(const CheckArgs& a) {
  if (a.mode != "deterministic" && a.mode != "noisy") {
    throw UsageError("--mode must be deterministic or noisy");
  }
  const auto mech = cli::build_mechanism(cli::parse_mechanism_spec(a.mech), a.xi);
  const auto p = cli::parse_distribution(a.dist);
  const auto perf = cli::parse_performance(a.perf);
  const auto violations = check_validity(mech, p, a.xi, perf, a.mode == "deterministic");
  if (violations.empty()) {
    fmt::print("{}: no violations (xi={}, {})\n", mech.name, a.xi, a.mode);
    return kOk;
  }
  fmt::print("{}: {} violation(s)\n", mech.name, violations.size());
  fmt::print("{:<6} {:>10} {:>10} {:>12}\n", "kind", "type", "report", "magnitude");
  for (const auto& v : violations) {
    fmt::print("{:<6} {:>10.6f} {:>10.6f} {:>12.6g}\n", to_string(v.kind), v.agent_type, v.report,
               v.magnitude);
  }
  return kViolation;
}

int run_simulate(const SimulateArgs& a) {
  const auto pop = load_population(a.population);
  const auto perf = cli::parse_performance(a.perf);
  const auto spec = cli::parse_mechanism_spec(a.mech);
  const auto profile = ReportProfile::truthful(pop);

  std::vector<Mechanism> mechs;
  if (spec.name == "asmcv") {
    if (pop.n() < 2) throw UsageError("asmcv needs at least 2 agents");
    const double beta = spec.get("beta", 0.0);
    if (beta < 0.0 || beta > 1.0) throw UsageError("asmcv beta must be in [0,1]");
    for (const auto& params : asmcv_assign(beta, profile, a.xi)) mechs.push_back(make_mcv(params));
  } else {
    mechs.assign(pop.n(), cli::build_mechanism(spec, a.xi));
  }
  const auto outcomes = run_mechanism(mechs, pop, profile, a.seed, perf);

  std::ostringstream csv;
  csv << "agent,true_t,report,verified,sample,grade\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    csv << i << ',' << format_double(pop.types()[i]) << ',' << format_double(profile.reports()[i])
        << ',' << (o.verified ? 1 : 0) << ',' << (o.sample ? format_double(*o.sample) : "") << ','
        << format_double(o.grade) << '\n';
  }
  if (a.out == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream out(a.out);
    if (!out) throw std::runtime_error("cannot write " + a.out);
    out << csv.str();
  }
  return kOk;
}

int run_nash(const NashArgs& a) {
  const auto pop = load_population(a.population);
  HistogramParams params{a.alpha, a.epsilon, pop.histogram()};
  if (!a.grid.empty()) {
    std::stringstream ss(a.grid);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double t = 0.0;
      try {
        t = std::stod(item);
      } catch (const std::exception&) {
        throw UsageError("invalid grid value '" + item + "'");
      }
      params.reference_histogram.try_emplace(t, 0);
    }
  }
  NashResult result;
  try {
    result = nash_bruteforce(params, pop);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  fmt::print("kappa {}\n", params.kappa());
  for (std::size_t k = 0; k < result.equilibria.size(); ++k) {
    std::string row;
    for (double r : result.equilibria[k]) row += (row.empty() ? "" : ",") + format_double(r);
    fmt::print("equilibrium {}: [{}] verified={}\n", k, row, result.verified_counts[k]);
  }
  const bool ok = result.unique && result.truthful_is_equilibrium;
  fmt::print("{} equilibria; truthful {}; {}\n", result.equilibria.size(),
             result.truthful_is_equilibrium ? "yes" : "no", ok ? "unique truthful" : "NOT unique truthful");
  return ok ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();

  CLI::App app{"Truthful grading mechanisms with costly verification"};
  app.require_subcommand(1);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Print bias, verification rate and max bias");
  eval_cmd->add_option("--mech", eval.mech, "Mechanism spec, e.g. mcv:gamma=0.5, pv:kappa=3, lv")->required();
  eval_cmd->add_option("--dist", eval.dist, "uniform:M | beta:a,b:M | file:PATH")->capture_default_str();
  eval_cmd->add_option("--xi", eval.xi, "Maximal penalty")->capture_default_str();
  eval_cmd->add_option("--perf", eval.perf, "deterministic | two_point:D | bernoulli")->capture_default_str();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Write an efficiency curve as CSV");
  sweep_cmd->add_option("--family", sweep.family, "mcv or pv")->required();
  sweep_cmd->add_option("--dist", sweep.dist, "uniform:M | beta:a,b:M | file:PATH")->capture_default_str();
  sweep_cmd->add_option("--xi", sweep.xis, "Maximal penalty (repeatable)");
  sweep_cmd->add_option("--out", sweep.out, "Output CSV path, '-' for stdout; {xi} is substituted")->required();
  sweep_cmd->add_option("--gammas", sweep.gamma_step, "MCV cutoff step")->capture_default_str();
  sweep_cmd->add_option("--kappas", sweep.kappas, "PV kappa list, e.g. 1,2,3");

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Certify HR1-HR3 by grid search");
  check_cmd->add_option("--mech", check.mech, "Mechanism spec")->required();
  check_cmd->add_option("--dist", check.dist, "Type distribution")->capture_default_str();
  check_cmd->add_option("--xi", check.xi, "Penalty budget")->capture_default_str();
  check_cmd->add_option("--mode", check.mode, "deterministic | noisy")->capture_default_str();
  check_cmd->add_option("--perf", check.perf, "Performance model for noisy mode")->capture_default_str();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the mechanism once on a truthful population");
  sim_cmd->add_option("--mech", sim.mech, "Mechanism spec (also asmcv:beta=B)")->required();
  sim_cmd->add_option("--population", sim.population, "File with one type per line")->required();
  sim_cmd->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
  sim_cmd->add_option("--perf", sim.perf, "Performance model")->capture_default_str();
  sim_cmd->add_option("--xi", sim.xi, "Maximal penalty")->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "Output CSV path, '-' for stdout")->capture_default_str();

  NashArgs nash;
  auto* nash_cmd = app.add_subcommand("nash", "Enumerate pure equilibria of the histogram mechanism");
  nash_cmd->add_option("--alpha", nash.alpha, "Scoring exponent in (1, 1+epsilon)")->capture_default_str();
  nash_cmd->add_option("--epsilon", nash.epsilon, "Minimum type gap")->capture_default_str();
  nash_cmd->add_option("--population", nash.population, "File with one type per line")->required();
  nash_cmd->add_option("--grid", nash.grid, "Extra admissible types, comma-separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*eval_cmd) return run_eval(eval);
    if (*sweep_cmd) return run_sweep(sweep);
    if (*check_cmd) return run_check(check);
    if (*sim_cmd) return run_simulate(sim);
    if (*nash_cmd) return run_nash(nash);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  }
  return kUsage;
}

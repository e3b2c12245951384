#include <cmath>
#include <stdexcept>
#include <string>

#include "verimech/strategy.hpp"

namespace verimech {

namespace {

// Integer-indexed view of a histogram game: reports and types are grid indices.
class HistogramGame {
 public:
  HistogramGame(const HistogramParams& params, const Population& pop) {
    params.validate();
    grid_ = params.type_grid();
    if (pop.n() > static_cast<std::size_t>(kNashMaxAgents) ||
        grid_.size() > static_cast<std::size_t>(kNashMaxGrid)) {
      throw std::invalid_argument("instance too large for brute force: n=" +
                                  std::to_string(pop.n()) + ", grid=" + std::to_string(grid_.size()) +
                                  " (limits " + std::to_string(kNashMaxAgents) + " agents, " +
                                  std::to_string(kNashMaxGrid) + " types)");
    }
    for (double t : grid_) reference_.push_back(params.reference_histogram.at(t));

    std::vector<int> counts(grid_.size(), 0);
    for (double t : pop.types()) {
      const int k = index_of(t);
      if (k < 0) throw std::invalid_argument("population type " + std::to_string(t) + " is off the grid");
      type_index_.push_back(k);
      ++counts[static_cast<std::size_t>(k)];
    }
    if (counts != reference_) throw std::invalid_argument("population does not match the reference histogram");

    epsilon_ = params.epsilon;
    const double alpha = 1.0 + 1.0 / params.kappa();
    const std::size_t g = grid_.size();
    score_.resize(g * g);
    for (std::size_t r = 0; r < g; ++r) {
      for (std::size_t t = 0; t < g; ++t) score_[r * g + t] = scoring_rule(alpha, grid_[r], grid_[t]);
    }
    profiles_ = 1;
    for (std::size_t i = 0; i < n(); ++i) profiles_ *= static_cast<long>(g);
  }

  std::size_t n() const { return type_index_.size(); }
  std::size_t g() const { return grid_.size(); }
  long profiles() const { return profiles_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<int>& types() const { return type_index_; }

  void decode(long index, std::vector<int>& reports) const {
    reports.resize(n());
    for (std::size_t i = 0; i < n(); ++i) {
      reports[i] = static_cast<int>(index % static_cast<long>(g()));
      index /= static_cast<long>(g());
    }
  }

  long encode(const std::vector<int>& reports) const {
    long index = 0;
    for (std::size_t i = n(); i-- > 0;) index = index * static_cast<long>(g()) + reports[i];
    return index;
  }

  int violating(const std::vector<int>& counts) const {
    for (std::size_t k = g(); k-- > 0;) {
      if (counts[k] > reference_[k]) return static_cast<int>(k);
    }
    return -1;
  }

  // Expected grade of agent i reporting r when the audited type is tv.
  double grade(std::size_t i, int r, int tv) const {
    const auto ri = static_cast<std::size_t>(r);
    if (r == tv) return epsilon_ + score_[ri * g() + static_cast<std::size_t>(type_index_[i])];
    return epsilon_ + grid_[ri];
  }

  bool is_equilibrium(const std::vector<int>& reports, std::vector<int>& counts) const {
    counts.assign(g(), 0);
    for (int r : reports) ++counts[static_cast<std::size_t>(r)];
    const int tv = violating(counts);
    for (std::size_t i = 0; i < n(); ++i) {
      const double current = grade(i, reports[i], tv);
      --counts[static_cast<std::size_t>(reports[i])];
      for (int alt = 0; alt < static_cast<int>(g()); ++alt) {
        if (alt == reports[i]) continue;
        ++counts[static_cast<std::size_t>(alt)];
        const double dev = grade(i, alt, violating(counts));
        --counts[static_cast<std::size_t>(alt)];
        if (dev > current + kProfitTol) return false;
      }
      ++counts[static_cast<std::size_t>(reports[i])];
    }
    return true;
  }

  int audited(const std::vector<int>& reports) const {
    std::vector<int> counts(g(), 0);
    for (int r : reports) ++counts[static_cast<std::size_t>(r)];
    const int tv = violating(counts);
    int c = 0;
    for (int r : reports) c += r == tv ? 1 : 0;
    return c;
  }

 private:
  int index_of(double t) const {
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      if (std::abs(grid_[k] - t) <= kSampleMatchTol) return static_cast<int>(k);
    }
    return -1;
  }

  std::vector<double> grid_;
  std::vector<int> reference_;
  std::vector<int> type_index_;
  std::vector<double> score_;
  double epsilon_ = 0.0;
  long profiles_ = 1;
};

NashResult collect(const HistogramGame& game, const std::vector<char>& is_eq) {
  NashResult out;
  std::vector<int> reports;
  const long truthful = game.encode(game.types());
  for (long idx = 0; idx < game.profiles(); ++idx) {
    if (!is_eq[static_cast<std::size_t>(idx)]) continue;
    game.decode(idx, reports);
    std::vector<double> values;
    for (int r : reports) values.push_back(game.grid()[static_cast<std::size_t>(r)]);
    out.equilibria.push_back(std::move(values));
    out.verified_counts.push_back(game.audited(reports));
    if (idx == truthful) out.truthful_is_equilibrium = true;
  }
  out.unique = out.equilibria.size() == 1;
  return out;
}

}  // namespace

NashResult nash_bruteforce(const HistogramParams& params, const Population& pop) {
  const HistogramGame game(params, pop);
  std::vector<char> is_eq(static_cast<std::size_t>(game.profiles()), 0);
  const long total = game.profiles();
#pragma omp parallel
  {
    std::vector<int> reports;
    std::vector<int> counts;
#pragma omp for schedule(static)
    for (long idx = 0; idx < total; ++idx) {
      game.decode(idx, reports);
      is_eq[static_cast<std::size_t>(idx)] = game.is_equilibrium(reports, counts) ? 1 : 0;
    }
  }
  return collect(game, is_eq);
}

NashResult nash_bruteforce_serial(const HistogramParams& params, const Population& pop) {
  const HistogramGame game(params, pop);
  std::vector<char> is_eq(static_cast<std::size_t>(game.profiles()), 0);
  std::vector<int> reports;
  std::vector<int> counts;
  for (long idx = 0; idx < game.profiles(); ++idx) {
    game.decode(idx, reports);
    is_eq[static_cast<std::size_t>(idx)] = game.is_equilibrium(reports, counts) ? 1 : 0;
  }
  return collect(game, is_eq);
}

}  // namespace verimech

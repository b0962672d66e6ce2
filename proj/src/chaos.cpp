#include "cloudctl/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cloudctl/rng.hpp"

namespace cloudctl {

double logistic_step(double alpha) { return 4.0 * alpha * (1.0 - alpha); }

double scale_to_interval(double alpha, double lo, double hi) { return lo + alpha * (hi - lo); }

namespace {

bool is_degenerate_seed(double a) {
  return a <= 0.0 || a >= 1.0 || a == 0.25 || a == 0.5 || a == 0.75;
}

double draw_orbit_seed(Rng& rng) {
  double a;
  do {
    a = rng.uniform01();
  } while (is_degenerate_seed(a));
  return a;
}

void validate(const SearchSpace& space) {
  if (space.gamma < 1 || space.bounds.size() != static_cast<std::size_t>(space.gamma))
    throw std::invalid_argument("search space: bounds must match gamma");
  for (const auto& [lo, hi] : space.bounds)
    if (!(lo < hi)) throw std::invalid_argument("search space: requires lo < hi per variable");
}

}  // namespace

OptResult chaos_optimize(const VectorObjective& objective, const SearchSpace& space,
                         const ChaosConfig& cfg, std::uint64_t seed) {
  validate(space);
  if (cfg.n_traj < 1) throw std::invalid_argument("chaos: n_traj must be >= 1");
  if (!(cfg.j_stop > 0.0)) throw std::invalid_argument("chaos: j_stop must be > 0");
  if (!(cfg.shrink > 0.0 && cfg.shrink < 1.0))
    throw std::invalid_argument("chaos: shrink must be in (0,1)");
  if (cfg.rounds_per_shrink < 1)
    throw std::invalid_argument("chaos: rounds_per_shrink must be >= 1");

  Rng rng(seed);
  const int gamma = space.gamma;
  std::vector<std::vector<double>> orbits(static_cast<std::size_t>(cfg.n_traj),
                                          std::vector<double>(gamma));
  for (auto& orbit : orbits)
    for (double& a : orbit) a = draw_orbit_seed(rng);

  std::vector<std::pair<double, double>> window = space.bounds;

  OptResult res;
  res.best_j = std::numeric_limits<double>::infinity();
  std::vector<double> candidate(gamma);

  int round = 0;
  while (res.evals < cfg.max_evals) {
    ++round;
    for (auto& orbit : orbits) {
      if (res.evals >= cfg.max_evals) break;
      for (int i = 0; i < gamma; ++i) {
        double a = logistic_step(orbit[i]);
        if (is_degenerate_seed(a)) a = draw_orbit_seed(rng);
        orbit[i] = a;
        candidate[i] = scale_to_interval(a, window[i].first, window[i].second);
      }
      const double j = objective(candidate);
      ++res.evals;
      if (j < res.best_j) {
        res.best_j = j;
        res.best = candidate;
      }
      if (res.best_j <= cfg.j_stop) {
        res.reached = true;
        res.iters = round;
        if (cfg.observer) cfg.observer(round, res.best_j, res.evals);
        return res;
      }
    }
    res.iters = round;
    if (cfg.observer) cfg.observer(round, res.best_j, res.evals);

    if (cfg.scale_intervals && round % cfg.rounds_per_shrink == 0 && !res.best.empty()) {
      for (int i = 0; i < gamma; ++i) {
        const double half = 0.5 * cfg.shrink * (window[i].second - window[i].first);
        double lo = std::max(window[i].first, res.best[i] - half);
        double hi = std::min(window[i].second, res.best[i] + half);
        if (!(lo < hi)) continue;  // window underflow, keep the old one
        window[i] = {lo, hi};
      }
    }
  }
  return res;
}

OptResult ga_optimize(const VectorObjective& objective, const SearchSpace& space,
                      const GaConfig& cfg, std::uint64_t seed) {
  validate(space);
  if (cfg.population < 1) throw std::invalid_argument("ga: population must be >= 1");
  if (!(cfg.j_stop > 0.0)) throw std::invalid_argument("ga: j_stop must be > 0");
  if (cfg.elites < 0 || cfg.elites > cfg.population)
    throw std::invalid_argument("ga: elites must be in [0, population]");

  Rng rng(seed);
  const int gamma = space.gamma;
  const double mutation_rate = cfg.mutation_rate < 0.0 ? 1.0 / gamma : cfg.mutation_rate;

  struct Individual {
    std::vector<double> genes;
    double j = std::numeric_limits<double>::infinity();
  };
  std::vector<Individual> pop(static_cast<std::size_t>(cfg.population));

  OptResult res;
  res.best_j = std::numeric_limits<double>::infinity();

  auto clamp_gene = [&](double v, int i) {
    return std::clamp(v, space.bounds[i].first, space.bounds[i].second);
  };
  auto evaluate = [&](Individual& ind) -> bool {
    ind.j = objective(ind.genes);
    ++res.evals;
    if (ind.j < res.best_j) {
      res.best_j = ind.j;
      res.best = ind.genes;
    }
    return res.best_j <= cfg.j_stop || res.evals >= cfg.max_evals;
  };

  for (auto& ind : pop) {
    ind.genes.resize(gamma);
    for (int i = 0; i < gamma; ++i)
      ind.genes[i] = rng.uniform(space.bounds[i].first, space.bounds[i].second);
    if (evaluate(ind)) {
      res.reached = res.best_j <= cfg.j_stop;
      return res;
    }
  }

  auto tournament = [&]() -> const Individual& {
    int winner = rng.uniform_int(0, cfg.population - 1);
    for (int t = 1; t < cfg.tournament; ++t) {
      const int challenger = rng.uniform_int(0, cfg.population - 1);
      if (pop[challenger].j < pop[winner].j) winner = challenger;
    }
    return pop[winner];
  };

  int generation = 0;
  while (res.evals < cfg.max_evals) {
    ++generation;
    const long evals_at_start = res.evals;
    std::vector<Individual> next;
    next.reserve(pop.size());

    std::vector<std::size_t> order(pop.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pop[a].j < pop[b].j; });
    for (int e = 0; e < cfg.elites; ++e) next.push_back(pop[order[e]]);

    while (next.size() < pop.size()) {
      Individual child;
      child.genes = tournament().genes;
      if (rng.uniform01() < cfg.crossover_rate) {
        const Individual& other = tournament();
        for (int i = 0; i < gamma; ++i) {
          const double mix = rng.uniform(-cfg.blend_alpha, 1.0 + cfg.blend_alpha);
          child.genes[i] = clamp_gene(child.genes[i] + mix * (other.genes[i] - child.genes[i]), i);
        }
      }
      for (int i = 0; i < gamma; ++i) {
        if (rng.uniform01() < mutation_rate) {
          const double range = space.bounds[i].second - space.bounds[i].first;
          child.genes[i] = clamp_gene(child.genes[i] + rng.normal(0.0, cfg.mutation_sigma * range), i);
        }
      }
      const bool done = evaluate(child);
      next.push_back(std::move(child));
      if (done) {
        res.reached = res.best_j <= cfg.j_stop;
        res.iters = generation;
        if (cfg.observer) cfg.observer(generation, res.best_j, res.evals);
        return res;
      }
    }
    pop = std::move(next);
    res.iters = generation;
    if (cfg.observer) cfg.observer(generation, res.best_j, res.evals);
    if (res.evals == evals_at_start) break;  // all elites: no variation can act
  }
  res.reached = res.best_j <= cfg.j_stop;
  return res;
}

}  // namespace cloudctl

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cloudctl/controller.hpp"

namespace cloudctl {

using VectorObjective = std::function<double(const std::vector<double>&)>;

// Called once per search round (both optimizers) for convergence logging.
using RoundObserver = std::function<void(int round, double best_j, long evals)>;

struct OptResult {
  std::vector<double> best;
  double best_j = 0.0;
  long evals = 0;
  long iters = 0;        // rounds, generations or CG iterations
  bool reached = false;  // best_j <= j_stop within the budget
};

// alpha_{s+1} = 4 alpha_s (1 - alpha_s).
double logistic_step(double alpha);

// lo + alpha * (hi - lo).
double scale_to_interval(double alpha, double lo, double hi);

struct ChaosConfig {
  int n_traj = 41;           // parallel logistic trajectories
  long max_evals = 100000;
  double j_stop = 1e-3;
  double shrink = 0.9;       // per-contraction interval scaling rate, in (0,1)
  int rounds_per_shrink = 50;
  bool scale_intervals = true;  // false = plain chaos search over fixed bounds
  RoundObserver observer;
};

// Parallel variable-scaling chaos search. Each trajectory carries one
// logistic orbit per variable; candidates are the orbits mapped into the
// per-variable windows, which contract by `shrink` around the incumbent
// best every rounds_per_shrink rounds. Seeds that land on the degenerate
// orbit values {0, 0.25, 0.5, 0.75, 1} are re-drawn, and an orbit that
// collapses onto the fixed points mid-run is re-seeded the same way.
OptResult chaos_optimize(const VectorObjective& objective, const SearchSpace& space,
                         const ChaosConfig& cfg, std::uint64_t seed);

struct GaConfig {
  int population = 40;
  long max_evals = 100000;
  double j_stop = 1e-3;
  double crossover_rate = 0.9;
  double mutation_rate = -1.0;  // per-gene; < 0 means 1/gamma
  double mutation_sigma = 0.1;  // fraction of the variable range
  double blend_alpha = 0.5;
  int tournament = 3;
  int elites = 1;
  RoundObserver observer;
};

// Generational GA baseline: tournament selection, blend crossover, gaussian
// mutation, elitism. Same termination contract as chaos_optimize.
OptResult ga_optimize(const VectorObjective& objective, const SearchSpace& space,
                      const GaConfig& cfg, std::uint64_t seed);

}  // namespace cloudctl

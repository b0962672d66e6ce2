#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cloudctl/cg.hpp"
#include "cloudctl/chaos.hpp"
#include "cloudctl/plant.hpp"

namespace cloudctl {

// Everything that fixes the tuning landscape: the plant, the controller
// family and the simulated experiment. sim_seed freezes the noise so the
// objective is a deterministic function of the encoded parameter vector.
struct TuningProblem {
  ArxPlant plant;
  ControllerStructure structure;
  double u_bound = 2.0;
  double u_min = -2.0, u_max = 2.0;
  double e_gain = 1.0, de_gain = 1.0;
  ReferenceSignal ref;
  LoopOptions loop;
  std::uint64_t sim_seed = 1;
};

// J1 of a fixed-seed closed-loop run as a function of the alpha vector.
// Diverged or infeasible candidates score +infinity.
VectorObjective make_j1_objective(const TuningProblem& problem);

CloudController build_controller(const TuningProblem& problem, const std::vector<double>& alphas);

struct HybridConfig {
  ChaosConfig chaos;            // chaos legs (their j_stop is overridden)
  CgConfig cg;                  // CG legs (j_stop/max_evals/box overridden)
  double handoff_factor = 1.6;  // first chaos leg stops at handoff_factor * j_stop
  double retarget = 0.7;        // later chaos legs must improve the best by this factor
  double resume_window = 0.25;  // window half-width (fraction of range) when chaos resumes
  long cg_leg_evals = -1;       // budget per CG leg; < 0 means 40 * gamma
};

struct HybridResult {
  OptResult chaos_phase;  // all chaos legs combined
  OptResult cg_phase;     // all CG legs combined
  OptResult combined;
};

// Alternating global/local search: a chaos leg runs to its handoff level,
// a budget-capped CG leg polishes the incumbent, and if the target is still
// not met, chaos resumes inside a window around the best point. Falls back
// to plain chaos behavior when the CG legs cannot make progress.
HybridResult hybrid_optimize(const VectorObjective& objective, const SearchSpace& space,
                             const HybridConfig& cfg, double j_stop, long max_evals,
                             std::uint64_t seed);

struct OnlineConfig {
  int window = 10;        // steps per J2 window
  int epochs = 10;        // CG updates (one window each)
  double grad_h = 1e-3;   // probe step in alpha space
  double line_tol = 1e-4;
};

struct OnlineResult {
  std::vector<double> alphas;
  SimTrace trace;       // the realized closed-loop trajectory
  double j1 = 0.0;      // over the realized trajectory
  long evals = 0;       // objective evaluations spent on updates
  int updates = 0;      // epochs that moved the parameters
  bool diverged = false;
};

// On-line refinement: every `window` steps the accumulated J2 over the next
// window (simulated from the frozen loop state with the frozen noise slice)
// is minimized by one conjugate-gradient step in alpha space, then the real
// trajectory advances under the updated controller.
OnlineResult online_tune(const TuningProblem& problem, const std::vector<double>& alphas0,
                         const OnlineConfig& cfg);

// ---- method comparison (evaluation counts to reach j_stop) --------------

struct CompareRun {
  std::uint64_t seed = 0;
  long evals = 0;
  bool reached = false;  // not reached = the infinity sentinel
};

struct MethodComparison {
  std::string method;
  std::vector<CompareRun> runs;
  bool median_reached = false;
  double median_evals = 0.0;  // meaningful only when median_reached
};

struct CompareConfig {
  std::vector<std::string> methods{"chaos", "cg", "ga", "hybrid"};
  int n_seeds = 20;
  std::uint64_t seed0 = 1;
  long max_evals = 20000;
  double j_stop = 1e-3;
  ChaosConfig chaos;  // the variable-scaling chaos search run on its own
  GaConfig ga;
  HybridConfig hybrid;
  CgConfig cg;
};

// Runs each method n_seeds times on the problem's fixed landscape.
// "chaos" is the variable-scaling chaos search alone, "cg" starts from a
// random point, "hybrid" alternates chaos with CG refinement.
std::vector<MethodComparison> compare_methods(const TuningProblem& problem,
                                              const CompareConfig& cfg);

}  // namespace cloudctl

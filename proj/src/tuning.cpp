#include "cloudctl/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cloudctl/rng.hpp"

namespace cloudctl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

CloudController build_controller(const TuningProblem& problem, const std::vector<double>& alphas) {
  return CloudController(decode(alphas, problem.structure, problem.u_bound), problem.u_min,
                         problem.u_max);
}

VectorObjective make_j1_objective(const TuningProblem& problem) {
  return [problem](const std::vector<double>& alphas) -> double {
    try {
      const CloudController ctl = build_controller(problem, alphas);
      const SimTrace trace =
          run_closed_loop(problem.plant, &ctl, problem.ref, problem.loop, problem.sim_seed);
      return j1(trace);
    } catch (const DivergedRun&) {
      return kInf;
    } catch (const NoRuleFires&) {
      return kInf;
    } catch (const std::invalid_argument&) {
      return kInf;
    }
  };
}

HybridResult hybrid_optimize(const VectorObjective& objective, const SearchSpace& space,
                             const HybridConfig& cfg, double j_stop, long max_evals,
                             std::uint64_t seed) {
  if (!(j_stop > 0.0)) throw std::invalid_argument("hybrid_optimize: j_stop must be > 0");
  const std::size_t gamma = space.bounds.size();
  const long cg_leg_budget =
      cfg.cg_leg_evals > 0 ? cfg.cg_leg_evals : 40 * static_cast<long>(gamma);

  HybridResult out;
  out.combined.best_j = kInf;
  out.chaos_phase.best_j = kInf;
  out.cg_phase.best_j = kInf;

  auto merge = [&](OptResult& phase, const OptResult& leg) {
    phase.evals += leg.evals;
    phase.iters += leg.iters;
    out.combined.evals += leg.evals;
    if (leg.best_j < phase.best_j && !leg.best.empty()) {
      phase.best_j = leg.best_j;
      phase.best = leg.best;
    }
    if (leg.best_j < out.combined.best_j && !leg.best.empty()) {
      out.combined.best_j = leg.best_j;
      out.combined.best = leg.best;
    }
  };

  SearchSpace window = space;
  double chaos_target = std::max(j_stop, cfg.handoff_factor * j_stop);
  std::uint64_t leg_seed = seed;

  while (out.combined.evals < max_evals) {
    ChaosConfig chaos_cfg = cfg.chaos;
    chaos_cfg.j_stop = chaos_target;
    chaos_cfg.max_evals = max_evals - out.combined.evals;
    merge(out.chaos_phase, chaos_optimize(objective, window, chaos_cfg, leg_seed++));
    if (out.combined.best_j <= j_stop || out.combined.evals >= max_evals ||
        out.combined.best.empty())
      break;

    CgConfig cg_cfg = cfg.cg;
    cg_cfg.j_stop = j_stop;
    cg_cfg.max_evals = std::min(cg_leg_budget, max_evals - out.combined.evals);
    cg_cfg.lo.resize(gamma);
    cg_cfg.hi.resize(gamma);
    for (std::size_t i = 0; i < gamma; ++i) {
      cg_cfg.lo[i] = space.bounds[i].first;
      cg_cfg.hi[i] = space.bounds[i].second;
    }
    try {
      merge(out.cg_phase, cg_optimize(objective, out.combined.best, cg_cfg));
    } catch (const GradientProbeFailed&) {
      // incumbent sits on a divergence cliff; the next chaos leg moves on
    }
    if (out.combined.best_j <= j_stop) break;

    // resume chaos in a window around the incumbent, demanding improvement
    for (std::size_t i = 0; i < gamma; ++i) {
      const double half = cfg.resume_window * (space.bounds[i].second - space.bounds[i].first);
      window.bounds[i] = {std::max(space.bounds[i].first, out.combined.best[i] - half),
                          std::min(space.bounds[i].second, out.combined.best[i] + half)};
    }
    chaos_target = std::max(j_stop, cfg.retarget * out.combined.best_j);
  }
  out.combined.reached = out.combined.best_j <= j_stop;
  return out;
}

namespace {

// Frozen-noise closed-loop state that can advance or be copied for lookahead.
struct LoopState {
  std::vector<double> y_hist, u_hist;
  double y_meas = 0.0;
  double prev_e = 0.0;
  int k = 1;
};

// Advances `steps` samples under `ctl`, accumulating sum(J2) over the window
// and appending to `trace` when given. Returns +inf on overflow.
double advance(const TuningProblem& problem, const std::vector<double>& noise, LoopState& state,
               const CloudController& ctl, int steps, SimTrace* trace) {
  double j2_sum = 0.0;
  for (int i = 0; i < steps; ++i) {
    if (state.k > problem.loop.steps) break;
    const double r = problem.ref.value(state.k);
    const double e = r - state.y_meas;
    const double de = e - state.prev_e;
    state.prev_e = e;
    const double e_norm = std::clamp(e * problem.e_gain, -1.0, 1.0);
    const double de_norm = std::clamp(de * problem.de_gain, -1.0, 1.0);
    const double u = ctl.control(e_norm, de_norm);
    if (trace) trace->rows.push_back(TraceRow{state.k, r, state.y_meas, u, e});
    j2_sum += j2(e);

    const double y_next =
        plant_step(problem.plant, state.y_hist, state.u_hist,
                   noise[static_cast<std::size_t>(state.k - 1)]);
    if (!(std::abs(y_next) <= problem.loop.overflow)) return kInf;
    if (!state.u_hist.empty()) {
      std::rotate(state.u_hist.rbegin(), state.u_hist.rbegin() + 1, state.u_hist.rend());
      state.u_hist[0] = u;
    }
    if (!state.y_hist.empty()) {
      std::rotate(state.y_hist.rbegin(), state.y_hist.rbegin() + 1, state.y_hist.rend());
      state.y_hist[0] = y_next;
    }
    state.y_meas = y_next;
    ++state.k;
  }
  return j2_sum;
}

}  // namespace

OnlineResult online_tune(const TuningProblem& problem, const std::vector<double>& alphas0,
                         const OnlineConfig& cfg) {
  if (cfg.window < 1 || cfg.epochs < 1)
    throw std::invalid_argument("online_tune: window and epochs must be >= 1");

  // Pre-draw the noise so lookahead and realization share one sequence.
  const int total_steps = problem.loop.steps;
  std::vector<double> noise(static_cast<std::size_t>(total_steps), 0.0);
  if (problem.plant.noise_std > 0.0) {
    Rng rng(problem.sim_seed);
    for (double& v : noise) v = rng.normal(0.0, problem.plant.noise_std);
  }

  OnlineResult out;
  out.alphas = alphas0;
  out.trace.dt = problem.loop.dt;

  LoopState state;
  state.y_hist.assign(problem.plant.a.size(), 0.0);
  state.u_hist.assign(problem.plant.b.size(), 0.0);

  constexpr double kAlphaMargin = 1e-6;
  std::vector<double> prev_grad, dir;

  for (int epoch = 0; epoch < cfg.epochs && state.k <= total_steps; ++epoch) {
    const LoopState frozen = state;
    auto window_objective = [&](const std::vector<double>& alphas) -> double {
      try {
        const CloudController ctl = build_controller(problem, alphas);
        LoopState probe = frozen;
        return advance(problem, noise, probe, ctl, cfg.window, nullptr);
      } catch (const std::invalid_argument&) {
        return kInf;
      } catch (const NoRuleFires&) {
        return kInf;
      }
    };
    auto counted = [&](const std::vector<double>& a) {
      ++out.evals;
      return window_objective(a);
    };

    bool moved = false;
    try {
      std::vector<double> g = fd_gradient(counted, out.alphas, cfg.grad_h);
      double gnorm = 0.0;
      for (double v : g) gnorm += v * v;
      if (gnorm > 0.0) {
        if (dir.empty()) {
          dir.assign(g.size(), 0.0);
        } else {
          const double beta = pr_beta(g, prev_grad);
          for (double& d : dir) d *= beta;
        }
        double descent = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
          dir[i] -= g[i];
          descent += dir[i] * g[i];
        }
        if (descent >= 0.0)
          for (std::size_t i = 0; i < g.size(); ++i) dir[i] = -g[i];
        prev_grad = g;

        auto clipped_objective = [&](const std::vector<double>& a) {
          std::vector<double> c = a;
          for (double& v : c) v = std::clamp(v, kAlphaMargin, 1.0 - kAlphaMargin);
          return counted(c);
        };
        const double eta = line_search(clipped_objective, out.alphas, dir, cfg.line_tol);
        if (eta > 0.0) {
          for (std::size_t i = 0; i < out.alphas.size(); ++i) {
            out.alphas[i] =
                std::clamp(out.alphas[i] + eta * dir[i], kAlphaMargin, 1.0 - kAlphaMargin);
          }
          moved = true;
        }
      }
    } catch (const GradientProbeFailed&) {
      // window not differentiable here; keep the parameters and move on
    } catch (const ZeroGradient&) {
    }
    if (moved) ++out.updates;

    const CloudController ctl = build_controller(problem, out.alphas);
    const double j2_window = advance(problem, noise, state, ctl, cfg.window, &out.trace);
    if (j2_window == kInf) {
      out.diverged = true;
      break;
    }
  }

  // run out the remaining horizon under the final parameters
  if (!out.diverged && state.k <= total_steps) {
    const CloudController ctl = build_controller(problem, out.alphas);
    const double tail =
        advance(problem, noise, state, ctl, total_steps - state.k + 1, &out.trace);
    if (tail == kInf) out.diverged = true;
  }
  out.j1 = j1(out.trace);
  return out;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<MethodComparison> compare_methods(const TuningProblem& problem,
                                              const CompareConfig& cfg) {
  const SearchSpace space = controller_search_space(problem.structure);
  const VectorObjective objective = make_j1_objective(problem);

  std::vector<MethodComparison> out;
  for (const std::string& method : cfg.methods) {
    MethodComparison mc;
    mc.method = method;
    for (int s = 0; s < cfg.n_seeds; ++s) {
      const std::uint64_t seed = cfg.seed0 + static_cast<std::uint64_t>(s);
      OptResult res;
      if (method == "chaos") {
        ChaosConfig c = cfg.chaos;
        c.j_stop = cfg.j_stop;
        c.max_evals = cfg.max_evals;
        res = chaos_optimize(objective, space, c, seed);
      } else if (method == "ga") {
        GaConfig g = cfg.ga;
        g.j_stop = cfg.j_stop;
        g.max_evals = cfg.max_evals;
        res = ga_optimize(objective, space, g, seed);
      } else if (method == "cg") {
        Rng rng(seed);
        std::vector<double> p0(space.bounds.size());
        for (std::size_t i = 0; i < p0.size(); ++i)
          p0[i] = rng.uniform(space.bounds[i].first + 1e-6, space.bounds[i].second - 1e-6);
        CgConfig c = cfg.cg;
        c.j_stop = cfg.j_stop;
        c.max_evals = cfg.max_evals;
        c.max_iters = std::numeric_limits<int>::max();
        c.lo.resize(space.bounds.size());
        c.hi.resize(space.bounds.size());
        for (std::size_t i = 0; i < space.bounds.size(); ++i) {
          c.lo[i] = space.bounds[i].first;
          c.hi[i] = space.bounds[i].second;
        }
        try {
          res = cg_optimize(objective, p0, c);
        } catch (const GradientProbeFailed&) {
          res = OptResult{};  // started in a diverging region: counts as infinity
        }
      } else if (method == "hybrid") {
        res = hybrid_optimize(objective, space, cfg.hybrid, cfg.j_stop, cfg.max_evals, seed)
                  .combined;
      } else {
        throw std::invalid_argument("compare_methods: unknown method " + method);
      }
      mc.runs.push_back(CompareRun{seed, res.evals, res.reached});
    }

    std::size_t reached = 0;
    std::vector<double> evals;
    for (const CompareRun& run : mc.runs) {
      if (run.reached) {
        ++reached;
        evals.push_back(static_cast<double>(run.evals));
      }
    }
    if (reached * 2 > mc.runs.size()) {
      // the median over all runs is finite: pad the failures with +inf,
      // which cannot displace it
      std::vector<double> all(mc.runs.size(), kInf);
      std::copy(evals.begin(), evals.end(), all.begin());
      mc.median_reached = true;
      mc.median_evals = median_of(all);
    }
    out.push_back(std::move(mc));
  }
  return out;
}

}  // namespace cloudctl

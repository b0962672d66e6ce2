#pragma once

#include <vector>

#include "cloudctl/chaos.hpp"
#include "cloudctl/errors.hpp"

namespace cloudctl {

struct CgConfig {
  double grad_h = 1e-6;     // probe step h * (1 + ||p||)
  double grad_tol = 1e-8;   // stop when ||grad|| <= grad_tol
  int max_iters = 500;
  long max_evals = -1;      // < 0 = unlimited
  double j_stop = -1.0;     // < 0 = disabled; else stop when J <= j_stop
  double line_tol = 1e-4;   // relative line-search tolerance
  std::vector<double> lo, hi;  // optional box; empty = unconstrained
  RoundObserver observer;
};

// Central finite-difference gradient with probe step h per coordinate.
// Throws GradientProbeFailed (with the coordinate) when a probe is not finite.
std::vector<double> fd_gradient(const VectorObjective& objective, const std::vector<double>& p,
                                double h);

// Polak-Ribiere conjugation coefficient
//   (g_k . g_k - g_k . g_km1) / (g_km1 . g_km1)
// clamped below at zero (direction restart). Throws ZeroGradient when the
// previous gradient vanishes; that is the convergence signal.
double pr_beta(const std::vector<double>& grad_k, const std::vector<double>& grad_km1);

// Bracketing plus golden-section/parabolic minimization of J(p + eta*dir)
// over eta >= 0 to relative tolerance `tol`. Guarantees
// J(p + eta*dir) <= J(p); returns 0 when no decrease is found.
double line_search(const VectorObjective& objective, const std::vector<double>& p,
                   const std::vector<double>& dir, double tol = 1e-4);

// Conjugate-gradient descent with finite-difference gradients: gradient ->
// beta -> direction update -> line search -> parameter update, until the
// gradient norm drops to grad_tol or a budget runs out. Accepted iterates
// never increase the objective.
OptResult cg_optimize(const VectorObjective& objective, std::vector<double> p0,
                      const CgConfig& cfg);

}  // namespace cloudctl

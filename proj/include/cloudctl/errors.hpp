#pragma once

#include <stdexcept>
#include <string>

namespace cloudctl {

// Raised when every rule fires with strength zero; the normalized weights
// h_l = w_l / sum(w) require sum(w) > 0.
struct NoRuleFires : std::runtime_error {
  NoRuleFires() : std::runtime_error("no rule fires: sum of firing strengths is zero") {}
};

// Previous gradient vanished while forming the conjugation coefficient.
// This is a convergence signal, not a failure.
struct ZeroGradient : std::runtime_error {
  ZeroGradient() : std::runtime_error("gradient norm is zero") {}
};

// A finite-difference probe returned a non-finite objective value.
struct GradientProbeFailed : std::runtime_error {
  explicit GradientProbeFailed(int coord)
      : std::runtime_error("objective not finite at finite-difference probe, coordinate " +
                           std::to_string(coord)),
        coordinate(coord) {}
  int coordinate;
};

// The Riccati iteration produced no positive definite solution with the
// required residual margin.
struct NoStabilizingSolution : std::runtime_error {
  explicit NoStabilizingSolution(const std::string& what) : std::runtime_error(what) {}
};

// (I - P*Q) is numerically singular; the compensator formulas are undefined.
struct SingularCoupling : std::runtime_error {
  explicit SingularCoupling(double cond)
      : std::runtime_error("I - P*Q is numerically singular (cond " + std::to_string(cond) + ")"),
        condition_number(cond) {}
  double condition_number;
};

}  // namespace cloudctl

#pragma once

#include <Eigen/Dense>

namespace cloudctl {

// Solves M X + X M^T = C for X (Sylvester/Lyapunov form) by Kronecker
// vectorization; intended for desk-scale dimensions. Throws
// std::runtime_error when the operator is singular (an eigenvalue pairing
// lambda_i + lambda_j == 0).
Eigen::MatrixXd solve_sylvester(const Eigen::MatrixXd& m, const Eigen::MatrixXd& c);

enum class RiccatiPreference {
  kMaximal,      // anti-stabilizing invariant subspace first
  kStabilizing,  // stable invariant subspace first
};

// Solves the quadratic matrix equation
//   A X + X A^T + X S X + Q = -eps * I
// for a symmetric positive definite X, with S and Q symmetric. Candidate
// solutions come from the stable and anti-stabilizing n-dimensional
// invariant subspaces of the Hamiltonian
//   H = [ A^T  S ]
//       [ -Q'  -A ],   Q' = Q + eps*I,
// each polished by Newton steps on the residual (one Sylvester solve per
// step). The first candidate that is positive definite and leaves the
// inequality residual A X + X A^T + X S X + Q below -eps/2 wins.
// Throws NoStabilizingSolution when no candidate qualifies.
Eigen::MatrixXd solve_care_plus(const Eigen::MatrixXd& a, const Eigen::MatrixXd& s,
                                const Eigen::MatrixXd& q, double eps,
                                RiccatiPreference prefer = RiccatiPreference::kMaximal);

}  // namespace cloudctl

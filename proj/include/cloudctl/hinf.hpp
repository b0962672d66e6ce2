#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "cloudctl/cloud.hpp"
#include "cloudctl/errors.hpp"
#include "cloudctl/riccati.hpp"
#include "cloudctl/rng.hpp"

namespace cloudctl {

// One uncertain T-S plant rule: nominal (A, B, C), the norm-bounded
// uncertainty factors of Delta{A,B,C} = D * delta(t) * E, and the
// triangular-cloud antecedents whose widths bound ||delta||.
struct UncertainRule {
  Eigen::MatrixXd a;  // n x n
  Eigen::MatrixXd b;  // n x m
  Eigen::MatrixXd c;  // s x n
  Eigen::MatrixXd d1, d2, d3;
  Eigen::MatrixXd e1, e2, e3;
  std::vector<TriangularCloud> antecedents;
};

struct UncertainTsPlant {
  std::vector<UncertainRule> rules;
  int n = 0, m = 0, s = 0;

  static UncertainTsPlant from_rules(std::vector<UncertainRule> rules);
};

// Dynamic output-feedback compensator of one control rule:
//   dx_c = A_hat x_c + B_c y,  u = C_c x_c.
struct Compensator {
  Eigen::MatrixXd a_hat;
  Eigen::MatrixXd b_c;
  Eigen::MatrixXd c_c;
};

// Augmented (plant rule i, compensator rule j) realization on X = (x, x_c):
//   A = [ A_i        B_i C_cj ]     B = [ I ]     C = [ C_i  0 ]
//       [ B_cj C_i   A_hat_j  ]         [ 0 ]
struct ClosedLoopRealization {
  Eigen::MatrixXd a_cl;
  Eigen::MatrixXd b_cl;
  Eigen::MatrixXd c_cl;
};

struct SynthesisCertificate {
  Eigen::MatrixXd p;      // P_j > 0
  Eigen::MatrixXd q;      // Q_j > 0
  Eigen::MatrixXd n_res;  // residual N_jj of the Q-inequality at the solution
  bool coupling_ok = false;
  double eps = 0.0;
};

// Stacks used by the synthesis inequalities. c_a and c_b are the plant-wide
// block stacks over all rules; c_ai and d_ai are the per-rule augmentation,
// scaled by sqrt(d_max) on each factor so their products carry the rule's
// width bound exactly once.
struct AugmentationMatrices {
  Eigen::MatrixXd c_a;
  Eigen::MatrixXd c_b;
  Eigen::MatrixXd c_ai;  // sqrt(d) * [E1; E3]
  Eigen::MatrixXd d_ai;  // sqrt(d) * [D1, D2, D3]
};

// max over antecedent clouds of the maximum width d0; 0 for no antecedents.
double uncertainty_bound(const UncertainRule& rule);

AugmentationMatrices build_augmentation(const UncertainTsPlant& plant, int rule_index);

// Draws a random symmetric delta with ||delta||_2 <= bound (bound in [0, 1))
// and returns d_factor * delta * e_factor.
Eigen::MatrixXd sample_uncertainty(const Eigen::MatrixXd& d_factor,
                                   const Eigen::MatrixXd& e_factor, double bound, Rng& rng);

ClosedLoopRealization build_closed_loop(const UncertainRule& rule_i, const Compensator& comp_j);

// Bounded-real certificate: p > tol*I and
// A^T p + p A + p B B^T p + C^T C has maximum eigenvalue < -tol.
bool brl_certificate_check(const Eigen::MatrixXd& p, const ClosedLoopRealization& cl, double tol);

// Checks sum_i k_i M_i M_i^T >= sum_i sum_j k_i k_j M_i M_j^T for simplex
// weights k (difference matrix minimum eigenvalue >= -tol).
bool sum_square_inequality_check(const std::vector<double>& k,
                                 const std::vector<Eigen::MatrixXd>& mats, double tol = 1e-9);

// P-inequality (per plant rule i):
//   A_i P + P A_i^T + P C_ai^T C_ai P + D_ai D_ai^T - B_i B_i^T < 0,
// solved as an equation with slack -eps*I. Returns P > 0 with residual
// maximum eigenvalue <= -eps/2.
Eigen::MatrixXd solve_p_riccati(const UncertainRule& rule_i, const AugmentationMatrices& aug,
                                double eps);

// Dual Q-inequality:
//   N = Q A_i + A_i^T Q + Q D_ai D_ai^T Q + C_ai^T C_ai - C_i^T C_i < 0.
// Returns (Q, N at the solution).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> solve_q_riccati(const UncertainRule& rule_i,
                                                            const AugmentationMatrices& aug,
                                                            double eps);

// [[P, I], [I, Q]] minimum eigenvalue > tol.
bool coupling_check(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, double tol);

// Compensator parameter matrices of rule j:
//   A_hat_j = A_j + B_j C_cj - B_cj C_j + Q_j^{-1} C_aj^T C_aj
//             - Q_j^{-1} N_jj (I - P_j Q_j)^{-1}
//   B_cj    = Q_j^{-1} C_j^T
//   C_cj    = B_j^T Q_j (I - P_j Q_j)^{-1}
// Throws SingularCoupling when I - P_j Q_j has condition number > 1e12.
Compensator synthesize_compensator(const UncertainTsPlant& plant, int j,
                                   const std::vector<SynthesisCertificate>& certs);

// True iff the open antecedent supports (Ex - En, Ex + En) intersect in
// every coordinate.
bool rules_overlap(const UncertainRule& rule_i, const UncertainRule& rule_j);

struct RobustSample {
  int index = 0;
  double spectral_abscissa = 0.0;
};

struct RobustReport {
  std::vector<RobustSample> samples;
  double worst = 0.0;
  bool pass = false;  // every sampled blended closed loop is Hurwitz
};

// Samples uncertainties within the width bounds and random constant simplex
// weights, assembles the blended closed loop and reports its spectral
// abscissa per sample.
RobustReport robust_verify(const UncertainTsPlant& plant,
                           const std::vector<Compensator>& compensators, int n_samples,
                           std::uint64_t seed);

struct PairCheck {
  int i = 0, j = 0;
  bool overlap = false;
  double spectral_abscissa = 0.0;
  bool brl_ok = false;  // a BRL witness P was found and verified
};

struct SynthesisResult {
  std::vector<SynthesisCertificate> certs;
  std::vector<Compensator> compensators;
  std::vector<PairCheck> pairs;
};

// Full per-rule synthesis pipeline: Riccati pair, coupling check,
// compensator formulas, then a BRL witness per overlapping (i, j) pair.
// eps per rule is eps_scale * ||A_i||.
SynthesisResult synthesize_all(const UncertainTsPlant& plant, double eps_scale = 1e-6);

}  // namespace cloudctl

#include "cloudctl/riccati.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "cloudctl/errors.hpp"

namespace cloudctl {

Eigen::MatrixXd solve_sylvester(const Eigen::MatrixXd& m, const Eigen::MatrixXd& c) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n || c.rows() != n || c.cols() != n)
    throw std::invalid_argument("solve_sylvester: square matrices of equal size required");

  // vec(M X + X M^T) = (I (x) M + M (x) I) vec(X)
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index col = 0; col < n; ++col)
    k.block(col * n, col * n, n, n) += m;
  for (Eigen::Index bi = 0; bi < n; ++bi)
    for (Eigen::Index bj = 0; bj < n; ++bj)
      k.block(bi * n, bj * n, n, n).diagonal().array() += m(bi, bj);

  Eigen::VectorXd rhs(n * n);
  for (Eigen::Index col = 0; col < n; ++col) rhs.segment(col * n, n) = c.col(col);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
  if (!lu.isInvertible()) throw std::runtime_error("solve_sylvester: singular operator");
  const Eigen::VectorXd x = lu.solve(rhs);

  Eigen::MatrixXd out(n, n);
  for (Eigen::Index col = 0; col < n; ++col) out.col(col) = x.segment(col * n, n);
  return out;
}

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& x) { return 0.5 * (x + x.transpose()); }

// Residual of the strict form (without the eps slack).
Eigen::MatrixXd riccati_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& s,
                                 const Eigen::MatrixXd& q, const Eigen::MatrixXd& x) {
  return symmetrize(a * x + x * a.transpose() + x * s * x + q);
}

// Extracts X = U2 * U1^{-1} from the n eigenvectors of H selected by
// `stable_half` (sign of the eigenvalue real part). Returns false when the
// subspace does not yield a real symmetric matrix.
bool subspace_solution(const Eigen::MatrixXd& h, bool stable_half, Eigen::MatrixXd& out) {
  const Eigen::Index n2 = h.rows();
  const Eigen::Index n = n2 / 2;
  Eigen::EigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) return false;

  std::vector<Eigen::Index> pick;
  for (Eigen::Index i = 0; i < n2; ++i) {
    const double re = es.eigenvalues()(i).real();
    if (std::abs(re) < 1e-9 * (1.0 + h.norm())) return false;  // axis eigenvalue
    if (stable_half ? re < 0.0 : re > 0.0) pick.push_back(i);
  }
  if (static_cast<Eigen::Index>(pick.size()) != n) return false;

  Eigen::MatrixXcd u1(n, n), u2(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    u1.col(j) = es.eigenvectors().col(pick[j]).head(n);
    u2.col(j) = es.eigenvectors().col(pick[j]).tail(n);
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(u1);
  if (!lu.isInvertible()) return false;
  const Eigen::MatrixXcd x = u2 * lu.inverse();
  if (x.imag().norm() > 1e-6 * (1.0 + x.real().norm())) return false;
  out = symmetrize(x.real());
  return true;
}

// Newton iteration on F(X) = A X + X A^T + X S X + Qeff = 0:
// (A + X S) D + D (A + X S)^T = -F(X), X <- X + D.
bool newton_polish(const Eigen::MatrixXd& a, const Eigen::MatrixXd& s,
                   const Eigen::MatrixXd& qeff, Eigen::MatrixXd& x) {
  const double scale = 1.0 + a.norm() + qeff.norm();
  for (int it = 0; it < 25; ++it) {
    const Eigen::MatrixXd res = riccati_residual(a, s, qeff, x);
    if (res.norm() <= 1e-13 * scale * (1.0 + x.squaredNorm())) return true;
    Eigen::MatrixXd delta;
    try {
      delta = solve_sylvester(a + x * s, -res);
    } catch (const std::runtime_error&) {
      return res.norm() <= 1e-8 * scale * (1.0 + x.squaredNorm());
    }
    if (!delta.allFinite() || delta.norm() > 1e6 * (1.0 + x.norm())) return false;
    x = symmetrize(x + delta);
  }
  return true;
}

}  // namespace

Eigen::MatrixXd solve_care_plus(const Eigen::MatrixXd& a, const Eigen::MatrixXd& s,
                                const Eigen::MatrixXd& q, double eps,
                                RiccatiPreference prefer) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || s.rows() != n || s.cols() != n || q.rows() != n || q.cols() != n)
    throw std::invalid_argument("solve_care_plus: dimension mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("solve_care_plus: eps must be > 0");

  const Eigen::MatrixXd s_sym = symmetrize(s);
  const Eigen::MatrixXd q_sym = symmetrize(q);
  const bool order[2] = {prefer == RiccatiPreference::kStabilizing,
                         prefer != RiccatiPreference::kStabilizing};

  // The equality at slack eps can pin a boundary solution that is not
  // positive definite even when the strict inequality has PD solutions
  // (the Lyapunov limit does exactly that). Escalating the slack moves the
  // equality into the feasible interior; any PD solution found there still
  // satisfies the original residual margin, which is what gets verified.
  for (int level = 0; level <= 12; ++level) {
    const double slack = eps * std::pow(10.0, level);
    const Eigen::MatrixXd qeff = q_sym + slack * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd h(2 * n, 2 * n);
    h << a.transpose(), s_sym, -qeff, -a;

    for (bool stable_half : order) {
      Eigen::MatrixXd x;
      if (!subspace_solution(h, stable_half, x)) continue;
      if (!newton_polish(a, s_sym, qeff, x)) continue;

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pd(x);
      if (pd.info() != Eigen::Success || pd.eigenvalues().minCoeff() <= 0.0) continue;
      const Eigen::MatrixXd strict = riccati_residual(a, s_sym, q_sym, x);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> res(strict);
      if (res.info() != Eigen::Success || res.eigenvalues().maxCoeff() > -0.5 * eps) continue;
      return x;
    }
  }
  throw NoStabilizingSolution(
      "solve_care_plus: no positive definite solution with the required margin");
}

}  // namespace cloudctl

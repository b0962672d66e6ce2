#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cloudctl/errors.hpp"
#include "cloudctl/riccati.hpp"
#include "cloudctl/rng.hpp"

using namespace cloudctl;
using Eigen::MatrixXd;

namespace {

MatrixXd random_stable(int n, Rng& rng) {
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal(0.0, 1.0);
  // shift the spectrum left of the imaginary axis
  const double abscissa = Eigen::EigenSolver<MatrixXd>(a, false).eigenvalues().real().maxCoeff();
  a -= (abscissa + 0.5 + rng.uniform(0.0, 1.0)) * MatrixXd::Identity(n, n);
  return a;
}

MatrixXd riccati_lhs(const MatrixXd& a, const MatrixXd& s, const MatrixXd& q, const MatrixXd& x) {
  const MatrixXd r = a * x + x * a.transpose() + x * s * x + q;
  return 0.5 * (r + r.transpose());
}

}  // namespace

TEST_CASE("sylvester solver against hand-checkable cases") {
  SUBCASE("scalar") {
    MatrixXd m(1, 1), c(1, 1);
    m << -2.0;
    c << 8.0;
    CHECK(solve_sylvester(m, c)(0, 0) == doctest::Approx(-2.0));  // -2x + x(-2) = 8
  }
  SUBCASE("residual vanishes on random instances") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + static_cast<int>(rng.next_u64() % 3);
      const MatrixXd m = random_stable(n, rng);
      MatrixXd c(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = rng.normal(0.0, 1.0);
      const MatrixXd x = solve_sylvester(m, c);
      CHECK((m * x + x * m.transpose() - c).norm() < 1e-9 * (1.0 + c.norm()));
    }
  }
}

TEST_CASE("scalar Riccati roots") {
  SUBCASE("always-feasible case a=-1, s=0, q=-1") {
    // the inequality -2p - 1 < 0 holds for every p > 0; the solver must
    // return some PD witness with the residual margin
    MatrixXd a(1, 1), s(1, 1), q(1, 1);
    a << -1.0;
    s << 0.0;
    q << -1.0;
    const MatrixXd p = solve_care_plus(a, s, q, 1e-6);
    CHECK(p(0, 0) > 0.0);
    CHECK(riccati_lhs(a, s, q, p).maxCoeff() <= -0.5e-6);
  }
  SUBCASE("p^2 - 2p - 1 < 0 feasible interval") {
    // a=-1, s=1, q=-1: solutions 1 +- sqrt(2 - eps); only the + root is PD
    MatrixXd a(1, 1), s(1, 1), q(1, 1);
    a << -1.0;
    s << 1.0;
    q << -1.0;
    const MatrixXd p = solve_care_plus(a, s, q, 1e-6);
    CHECK(p(0, 0) > 0.0);
    CHECK(p(0, 0) < 1.0 + std::sqrt(2.0));
    CHECK(p(0, 0) * p(0, 0) - 2.0 * p(0, 0) - 1.0 < 0.0);
  }
  SUBCASE("infeasible sign obstruction a=+1, s=0, q=0") {
    // 2q = -eps has no positive solution
    MatrixXd a(1, 1), s(1, 1), q(1, 1);
    a << 1.0;
    s << 0.0;
    q << 0.0;
    CHECK_THROWS_AS(solve_care_plus(a, s, q, 1e-6), NoStabilizingSolution);
  }
}

TEST_CASE("Lyapunov limit: s = 0 reduces to the Lyapunov equation") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2;
    const MatrixXd a = random_stable(n, rng);
    MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = rng.normal(0.0, 1.0);
    const MatrixXd d = 0.05 * MatrixXd::Identity(n, n);  // d_a small
    const double eps = 1e-8;
    const MatrixXd q = d * d.transpose() - b * b.transpose() - 2.0 * MatrixXd::Identity(n, n);
    const MatrixXd s = MatrixXd::Zero(n, n);
    // direct Lyapunov solve of a p + p a^T = -(q + eps I)
    const MatrixXd direct = solve_sylvester(a, -(q + eps * MatrixXd::Identity(n, n)));
    if (Eigen::SelfAdjointEigenSolver<MatrixXd>(direct).eigenvalues().minCoeff() <= 0.0)
      continue;  // this draw's Lyapunov solution is indefinite: no comparison
    const MatrixXd p = solve_care_plus(a, s, q, eps);
    CHECK((p - direct).norm() < 1e-6 * (1.0 + direct.norm()));
  }
}

TEST_CASE("residual margin on random stable desk-scale instances") {
  Rng rng(23);
  int solved = 0;
  for (int trial = 0; trial < 80 && solved < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 4);
    const MatrixXd a = random_stable(n, rng);
    MatrixXd c_a(1, n), b(n, 1);
    for (int j = 0; j < n; ++j) c_a(0, j) = 0.3 * rng.normal(0.0, 1.0);
    for (int i = 0; i < n; ++i) b(i, 0) = rng.normal(0.0, 1.0);
    const MatrixXd s = c_a.transpose() * c_a;
    const MatrixXd q = -b * b.transpose() - 0.1 * MatrixXd::Identity(n, n);
    const double eps = 1e-6 * a.norm();
    MatrixXd p;
    try {
      p = solve_care_plus(a, s, q, eps);
    } catch (const NoStabilizingSolution&) {
      continue;
    }
    ++solved;
    Eigen::SelfAdjointEigenSolver<MatrixXd> pd(p);
    CHECK(pd.eigenvalues().minCoeff() > 0.0);
    CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(riccati_lhs(a, s, q, p))
              .eigenvalues()
              .maxCoeff() <= -0.5 * eps);
  }
  CHECK(solved >= 50);
}

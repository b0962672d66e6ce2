#include "cloudctl/hinf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cloudctl {

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& x) { return 0.5 * (x + x.transpose()); }

double max_eig_sym(const Eigen::MatrixXd& x) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(symmetrize(x)).eigenvalues().maxCoeff();
}

double min_eig_sym(const Eigen::MatrixXd& x) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(symmetrize(x)).eigenvalues().minCoeff();
}

double spectral_abscissa(const Eigen::MatrixXd& a) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues().real().maxCoeff();
}

void require_symmetric(const Eigen::MatrixXd& x, const char* who) {
  if (x.rows() != x.cols() || (x - x.transpose()).norm() > 1e-9 * (1.0 + x.norm()))
    throw std::invalid_argument(std::string(who) + ": matrix must be symmetric");
}

}  // namespace

UncertainTsPlant UncertainTsPlant::from_rules(std::vector<UncertainRule> rules) {
  if (rules.empty()) throw std::invalid_argument("UncertainTsPlant: needs at least one rule");
  UncertainTsPlant plant;
  plant.n = static_cast<int>(rules.front().a.rows());
  plant.m = static_cast<int>(rules.front().b.cols());
  plant.s = static_cast<int>(rules.front().c.rows());
  for (const UncertainRule& r : rules) {
    if (r.a.rows() != plant.n || r.a.cols() != plant.n || r.b.rows() != plant.n ||
        r.b.cols() != plant.m || r.c.rows() != plant.s || r.c.cols() != plant.n)
      throw std::invalid_argument("UncertainTsPlant: rule dimensions are inconsistent");
    if (r.d1.rows() != plant.n || r.e1.cols() != plant.n || r.d1.cols() != r.e1.rows() ||
        r.d2.rows() != plant.n || r.e2.cols() != plant.m || r.d2.cols() != r.e2.rows() ||
        r.d3.rows() != plant.s || r.e3.cols() != plant.n || r.d3.cols() != r.e3.rows())
      throw std::invalid_argument("UncertainTsPlant: uncertainty factor dimensions do not fit");
  }
  plant.rules = std::move(rules);
  return plant;
}

double uncertainty_bound(const UncertainRule& rule) {
  double d = 0.0;
  for (const TriangularCloud& cloud : rule.antecedents) d = std::max(d, cloud.max_width());
  return d;
}

AugmentationMatrices build_augmentation(const UncertainTsPlant& plant, int rule_index) {
  if (rule_index < 0 || rule_index >= static_cast<int>(plant.rules.size()))
    throw std::invalid_argument("build_augmentation: rule index out of range");

  Eigen::Index ca_rows = 0, cb_rows = 0;
  for (const UncertainRule& r : plant.rules) {
    ca_rows += r.e1.rows() + r.e2.rows() + r.e3.rows();
    cb_rows = ca_rows;
  }
  AugmentationMatrices aug;
  aug.c_a = Eigen::MatrixXd::Zero(ca_rows, plant.n);
  aug.c_b = Eigen::MatrixXd::Zero(cb_rows, plant.m);
  Eigen::Index row = 0;
  for (const UncertainRule& r : plant.rules) {
    aug.c_a.block(row, 0, r.e1.rows(), plant.n) = r.e1;
    row += r.e1.rows();
    aug.c_b.block(row, 0, r.e2.rows(), plant.m) = r.e2;
    row += r.e2.rows();
    aug.c_a.block(row, 0, r.e3.rows(), plant.n) = r.e3;
    row += r.e3.rows();
  }

  const UncertainRule& rule = plant.rules[static_cast<std::size_t>(rule_index)];
  const double scale = std::sqrt(uncertainty_bound(rule));
  aug.c_ai = Eigen::MatrixXd::Zero(rule.e1.rows() + rule.e3.rows(), plant.n);
  aug.c_ai.topRows(rule.e1.rows()) = scale * rule.e1;
  aug.c_ai.bottomRows(rule.e3.rows()) = scale * rule.e3;
  aug.d_ai = Eigen::MatrixXd::Zero(plant.n, rule.d1.cols() + rule.d2.cols() + rule.d3.cols());
  aug.d_ai.leftCols(rule.d1.cols()) = scale * rule.d1;
  aug.d_ai.middleCols(rule.d1.cols(), rule.d2.cols()) = scale * rule.d2;
  // D3 acts on the measured output; it enters the state augmentation only
  // when s == n, otherwise its columns stay zero.
  if (rule.d3.rows() == plant.n)
    aug.d_ai.rightCols(rule.d3.cols()) = scale * rule.d3;
  return aug;
}

Eigen::MatrixXd sample_uncertainty(const Eigen::MatrixXd& d_factor,
                                   const Eigen::MatrixXd& e_factor, double bound, Rng& rng) {
  if (!(bound >= 0.0 && bound < 1.0))
    throw std::invalid_argument("sample_uncertainty: bound must be in [0, 1)");
  const Eigen::Index k = d_factor.cols();
  if (e_factor.rows() != k)
    throw std::invalid_argument("sample_uncertainty: factor dimensions do not fit");
  if (bound == 0.0 || k == 0) return Eigen::MatrixXd::Zero(d_factor.rows(), e_factor.cols());

  Eigen::MatrixXd raw(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) raw(i, j) = rng.normal(0.0, 1.0);
  Eigen::MatrixXd delta = symmetrize(raw);
  const double norm2 =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(delta).eigenvalues().cwiseAbs().maxCoeff();
  if (norm2 == 0.0) return Eigen::MatrixXd::Zero(d_factor.rows(), e_factor.cols());
  delta *= bound * rng.uniform01() / norm2;
  return d_factor * delta * e_factor;
}

ClosedLoopRealization build_closed_loop(const UncertainRule& rule_i, const Compensator& comp_j) {
  const Eigen::Index n = rule_i.a.rows();
  if (comp_j.a_hat.rows() != n || comp_j.b_c.rows() != n || comp_j.b_c.cols() != rule_i.c.rows() ||
      comp_j.c_c.cols() != n || comp_j.c_c.rows() != rule_i.b.cols())
    throw std::invalid_argument("build_closed_loop: compensator dimensions do not fit the rule");

  ClosedLoopRealization cl;
  cl.a_cl = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  cl.a_cl.topLeftCorner(n, n) = rule_i.a;
  cl.a_cl.topRightCorner(n, n) = rule_i.b * comp_j.c_c;
  cl.a_cl.bottomLeftCorner(n, n) = comp_j.b_c * rule_i.c;
  cl.a_cl.bottomRightCorner(n, n) = comp_j.a_hat;

  cl.b_cl = Eigen::MatrixXd::Zero(2 * n, n);
  cl.b_cl.topRows(n) = Eigen::MatrixXd::Identity(n, n);

  cl.c_cl = Eigen::MatrixXd::Zero(rule_i.c.rows(), 2 * n);
  cl.c_cl.leftCols(n) = rule_i.c;
  return cl;
}

bool brl_certificate_check(const Eigen::MatrixXd& p, const ClosedLoopRealization& cl,
                           double tol) {
  require_symmetric(p, "brl_certificate_check");
  if (min_eig_sym(p) <= tol) return false;
  const Eigen::MatrixXd res = cl.a_cl.transpose() * p + p * cl.a_cl +
                              p * cl.b_cl * cl.b_cl.transpose() * p +
                              cl.c_cl.transpose() * cl.c_cl;
  return max_eig_sym(res) < -tol;
}

bool sum_square_inequality_check(const std::vector<double>& k,
                                 const std::vector<Eigen::MatrixXd>& mats, double tol) {
  if (k.size() != mats.size())
    throw std::invalid_argument("sum_square_inequality_check: weight/matrix count mismatch");
  if (k.empty()) throw std::invalid_argument("sum_square_inequality_check: empty input");
  double total = 0.0;
  for (double w : k) {
    if (w < 0.0) throw std::invalid_argument("sum_square_inequality_check: weights must be >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("sum_square_inequality_check: weights must sum to 1");

  const Eigen::Index rows = mats.front().rows();
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(rows, rows);
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(rows, mats.front().cols());
  for (std::size_t i = 0; i < mats.size(); ++i) {
    lhs += k[i] * mats[i] * mats[i].transpose();
    mean += k[i] * mats[i];
  }
  // sum_i sum_j k_i k_j M_i M_j^T == (sum k M)(sum k M)^T
  return min_eig_sym(lhs - mean * mean.transpose()) >= -tol;
}

Eigen::MatrixXd solve_p_riccati(const UncertainRule& rule_i, const AugmentationMatrices& aug,
                                double eps) {
  const Eigen::MatrixXd s = aug.c_ai.transpose() * aug.c_ai;
  const Eigen::MatrixXd q =
      aug.d_ai * aug.d_ai.transpose() - rule_i.b * rule_i.b.transpose();
  return solve_care_plus(rule_i.a, s, q, eps, RiccatiPreference::kMaximal);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> solve_q_riccati(const UncertainRule& rule_i,
                                                            const AugmentationMatrices& aug,
                                                            double eps) {
  const Eigen::MatrixXd s = aug.d_ai * aug.d_ai.transpose();
  const Eigen::MatrixXd add = aug.c_ai.transpose() * aug.c_ai - rule_i.c.transpose() * rule_i.c;
  // Q A + A^T Q + Q S Q + add < 0 matches the solver core with A -> A^T.
  const Eigen::MatrixXd q_sol =
      solve_care_plus(rule_i.a.transpose(), s, add, eps, RiccatiPreference::kMaximal);
  const Eigen::MatrixXd n_res = q_sol * rule_i.a + rule_i.a.transpose() * q_sol +
                                q_sol * s * q_sol + add;
  return {q_sol, 0.5 * (n_res + n_res.transpose())};
}

bool coupling_check(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, double tol) {
  require_symmetric(p, "coupling_check");
  require_symmetric(q, "coupling_check");
  if (p.rows() != q.rows()) throw std::invalid_argument("coupling_check: dimension mismatch");
  const Eigen::Index n = p.rows();
  Eigen::MatrixXd block(2 * n, 2 * n);
  block << p, Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Identity(n, n), q;
  return min_eig_sym(block) > tol;
}

Compensator synthesize_compensator(const UncertainTsPlant& plant, int j,
                                   const std::vector<SynthesisCertificate>& certs) {
  if (j < 0 || j >= static_cast<int>(plant.rules.size()))
    throw std::invalid_argument("synthesize_compensator: rule index out of range");
  const UncertainRule& rule = plant.rules[static_cast<std::size_t>(j)];
  const SynthesisCertificate& cert = certs.at(static_cast<std::size_t>(j));
  const Eigen::Index n = rule.a.rows();

  const Eigen::MatrixXd ipq = Eigen::MatrixXd::Identity(n, n) - cert.p * cert.q;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ipq);
  const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
  if (!std::isfinite(cond) || cond > 1e12) throw SingularCoupling(cond);

  const Eigen::MatrixXd ipq_inv = ipq.inverse();
  const Eigen::MatrixXd q_inv = cert.q.inverse();
  const AugmentationMatrices aug = build_augmentation(plant, j);

  Compensator comp;
  comp.b_c = q_inv * rule.c.transpose();
  comp.c_c = rule.b.transpose() * cert.q * ipq_inv;
  comp.a_hat = rule.a + rule.b * comp.c_c - comp.b_c * rule.c +
               q_inv * aug.c_ai.transpose() * aug.c_ai - q_inv * cert.n_res * ipq_inv;
  return comp;
}

bool rules_overlap(const UncertainRule& rule_i, const UncertainRule& rule_j) {
  if (rule_i.antecedents.size() != rule_j.antecedents.size())
    throw std::invalid_argument("rules_overlap: antecedent dimensions differ");
  for (std::size_t d = 0; d < rule_i.antecedents.size(); ++d) {
    const TriangularCloud& a = rule_i.antecedents[d];
    const TriangularCloud& b = rule_j.antecedents[d];
    const double lo = std::max(a.ex() - a.en(), b.ex() - b.en());
    const double hi = std::min(a.ex() + a.en(), b.ex() + b.en());
    if (!(lo < hi)) return false;
  }
  return true;
}

RobustReport robust_verify(const UncertainTsPlant& plant,
                           const std::vector<Compensator>& compensators, int n_samples,
                           std::uint64_t seed) {
  if (compensators.size() != plant.rules.size())
    throw std::invalid_argument("robust_verify: one compensator per rule required");
  Rng rng(seed);
  const std::size_t r = plant.rules.size();
  const Eigen::Index n = plant.n;

  RobustReport report;
  report.pass = true;
  report.worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    // simplex weights via normalized exponentials
    std::vector<double> h(r);
    double total = 0.0;
    for (double& w : h) {
      w = -std::log(1.0 - rng.uniform01());
      total += w;
    }
    for (double& w : h) w /= total;

    Eigen::MatrixXd a_bar = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd b_bar = Eigen::MatrixXd::Zero(n, plant.m);
    Eigen::MatrixXd c_bar = Eigen::MatrixXd::Zero(plant.s, n);
    Eigen::MatrixXd ahat_bar = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd bc_bar = Eigen::MatrixXd::Zero(n, plant.s);
    Eigen::MatrixXd cc_bar = Eigen::MatrixXd::Zero(plant.m, n);
    for (std::size_t l = 0; l < r; ++l) {
      const UncertainRule& rule = plant.rules[l];
      const double bound = uncertainty_bound(rule);
      a_bar += h[l] * (rule.a + sample_uncertainty(rule.d1, rule.e1, bound, rng));
      b_bar += h[l] * (rule.b + sample_uncertainty(rule.d2, rule.e2, bound, rng));
      c_bar += h[l] * (rule.c + sample_uncertainty(rule.d3, rule.e3, bound, rng));
      ahat_bar += h[l] * compensators[l].a_hat;
      bc_bar += h[l] * compensators[l].b_c;
      cc_bar += h[l] * compensators[l].c_c;
    }
    Eigen::MatrixXd a_cl(2 * n, 2 * n);
    a_cl << a_bar, b_bar * cc_bar, bc_bar * c_bar, ahat_bar;

    RobustSample sample;
    sample.index = s;
    sample.spectral_abscissa = spectral_abscissa(a_cl);
    report.worst = std::max(report.worst, sample.spectral_abscissa);
    if (sample.spectral_abscissa >= 0.0) report.pass = false;
    report.samples.push_back(sample);
  }
  return report;
}

SynthesisResult synthesize_all(const UncertainTsPlant& plant, double eps_scale) {
  SynthesisResult out;
  const int r = static_cast<int>(plant.rules.size());
  out.certs.resize(static_cast<std::size_t>(r));
  for (int j = 0; j < r; ++j) {
    const UncertainRule& rule = plant.rules[static_cast<std::size_t>(j)];
    const AugmentationMatrices aug = build_augmentation(plant, j);
    const double eps = eps_scale * rule.a.norm();
    SynthesisCertificate& cert = out.certs[static_cast<std::size_t>(j)];
    cert.eps = eps;
    cert.p = solve_p_riccati(rule, aug, eps);
    auto [q_sol, n_res] = solve_q_riccati(rule, aug, eps);
    cert.q = q_sol;
    cert.n_res = n_res;
    cert.coupling_ok = coupling_check(cert.p, cert.q, 1e-9);
    out.compensators.push_back(synthesize_compensator(plant, j, out.certs));
  }
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      PairCheck pc;
      pc.i = i;
      pc.j = j;
      pc.overlap = rules_overlap(plant.rules[static_cast<std::size_t>(i)],
                                 plant.rules[static_cast<std::size_t>(j)]);
      if (!pc.overlap) {
        out.pairs.push_back(pc);
        continue;
      }
      const ClosedLoopRealization cl =
          build_closed_loop(plant.rules[static_cast<std::size_t>(i)],
                            out.compensators[static_cast<std::size_t>(j)]);
      pc.spectral_abscissa = spectral_abscissa(cl.a_cl);
      try {
        const double eps = eps_scale * cl.a_cl.norm();
        const Eigen::MatrixXd p_brl =
            solve_care_plus(cl.a_cl.transpose(), cl.b_cl * cl.b_cl.transpose(),
                            cl.c_cl.transpose() * cl.c_cl, eps, RiccatiPreference::kStabilizing);
        pc.brl_ok = brl_certificate_check(p_brl, cl, 0.0);
      } catch (const NoStabilizingSolution&) {
        pc.brl_ok = false;
      }
      out.pairs.push_back(pc);
    }
  }
  return out;
}

}  // namespace cloudctl

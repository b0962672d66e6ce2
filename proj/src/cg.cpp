#include "cloudctl/cg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cloudctl {

std::vector<double> fd_gradient(const VectorObjective& objective, const std::vector<double>& p,
                                double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: h must be > 0");
  std::vector<double> grad(p.size());
  std::vector<double> probe = p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    probe[i] = p[i] + h;
    const double f_plus = objective(probe);
    probe[i] = p[i] - h;
    const double f_minus = objective(probe);
    probe[i] = p[i];
    if (!std::isfinite(f_plus) || !std::isfinite(f_minus))
      throw GradientProbeFailed(static_cast<int>(i));
    grad[i] = (f_plus - f_minus) / (2.0 * h);
  }
  return grad;
}

double pr_beta(const std::vector<double>& grad_k, const std::vector<double>& grad_km1) {
  if (grad_k.size() != grad_km1.size())
    throw std::invalid_argument("pr_beta: gradient dimensions differ");
  double gkgk = 0.0, gkgkm1 = 0.0, denom = 0.0;
  for (std::size_t i = 0; i < grad_k.size(); ++i) {
    gkgk += grad_k[i] * grad_k[i];
    gkgkm1 += grad_k[i] * grad_km1[i];
    denom += grad_km1[i] * grad_km1[i];
  }
  if (!(denom > 0.0)) throw ZeroGradient();
  return std::max(0.0, (gkgk - gkgkm1) / denom);
}

namespace {

struct LineResult {
  double eta = 0.0;
  double f = 0.0;
};

// Bracket the minimum of phi on eta > 0, then Brent (golden section with
// parabolic interpolation). phi0 = phi(0) must already be known.
template <typename Phi>
LineResult minimize_along(const Phi& phi, double phi0, double tol) {
  // find a first decrease
  double t = 1.0;
  double ft = phi(t);
  while (!(ft < phi0) && t > 1e-14) {
    t *= 0.25;
    ft = phi(t);
  }
  if (!(ft < phi0)) return {0.0, phi0};

  // expand until the function turns upward
  double a = 0.0, b = t, c = 2.0 * t;
  double fb = ft, fc = phi(c);
  while (fc < fb && c < 1e12) {
    a = b;
    b = c;
    fb = fc;
    c *= 2.0;
    fc = phi(c);
  }

  // Brent on [a, c] starting from b
  const double gold = 0.3819660112501051;
  double x = b, w = b, v = b;
  double fx = fb, fw = fb, fv = fb;
  double d = 0.0, e = 0.0;
  double lo = a, hi = c;
  for (int iter = 0; iter < 100; ++iter) {
    const double m = 0.5 * (lo + hi);
    const double tol1 = tol * std::abs(x) + 1e-12;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - m) <= tol2 - 0.5 * (hi - lo)) break;
    bool use_golden = true;
    if (std::abs(e) > tol1) {
      // parabolic fit through (x, w, v)
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double pnum = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) pnum = -pnum;
      q = std::abs(q);
      const double e_old = e;
      e = d;
      if (std::abs(pnum) < std::abs(0.5 * q * e_old) && pnum > q * (lo - x) &&
          pnum < q * (hi - x)) {
        d = pnum / q;
        use_golden = false;
        const double u = x + d;
        if (u - lo < tol2 || hi - u < tol2) d = x < m ? tol1 : -tol1;
      }
    }
    if (use_golden) {
      e = (x < m ? hi : lo) - x;
      d = gold * e;
    }
    const double u = std::abs(d) >= tol1 ? x + d : x + (d > 0.0 ? tol1 : -tol1);
    const double fu = phi(u);
    if (fu <= fx) {
      if (u < x)
        hi = x;
      else
        lo = x;
      v = w, fv = fw;
      w = x, fw = fx;
      x = u, fx = fu;
    } else {
      if (u < x)
        lo = u;
      else
        hi = u;
      if (fu <= fw || w == x) {
        v = w, fv = fw;
        w = u, fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u, fv = fu;
      }
    }
  }
  if (!(fx < phi0)) return {0.0, phi0};
  return {x, fx};
}

}  // namespace

double line_search(const VectorObjective& objective, const std::vector<double>& p,
                   const std::vector<double>& dir, double tol) {
  double dir_norm = 0.0;
  for (double d : dir) dir_norm += d * d;
  if (!(dir_norm > 0.0)) return 0.0;

  std::vector<double> probe(p.size());
  auto phi = [&](double eta) {
    for (std::size_t i = 0; i < p.size(); ++i) probe[i] = p[i] + eta * dir[i];
    return objective(probe);
  };
  return minimize_along(phi, objective(p), tol).eta;
}

OptResult cg_optimize(const VectorObjective& objective, std::vector<double> p0,
                      const CgConfig& cfg) {
  const std::size_t n = p0.size();
  if (n == 0) throw std::invalid_argument("cg_optimize: empty parameter vector");
  const bool boxed = !cfg.lo.empty();
  if (boxed && (cfg.lo.size() != n || cfg.hi.size() != n))
    throw std::invalid_argument("cg_optimize: box bounds must match the parameter dimension");

  OptResult res;
  auto clip = [&](std::vector<double>& v) {
    if (!boxed) return;
    for (std::size_t i = 0; i < n; ++i) v[i] = std::clamp(v[i], cfg.lo[i], cfg.hi[i]);
  };
  clip(p0);

  std::vector<double> scratch(n);
  auto eval = [&](const std::vector<double>& v) {
    if (boxed) {
      scratch = v;
      clip(scratch);
      ++res.evals;
      return objective(scratch);
    }
    ++res.evals;
    return objective(v);
  };

  std::vector<double> p = std::move(p0);
  double j_cur = eval(p);
  res.best = p;
  res.best_j = j_cur;

  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  auto budget_left = [&](long need) {
    return cfg.max_evals < 0 || res.evals + need <= cfg.max_evals;
  };

  std::vector<double> grad, dir, probe(n);
  bool have_dir = false;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    if (cfg.j_stop > 0.0 && res.best_j <= cfg.j_stop) {
      res.reached = true;
      break;
    }
    if (!budget_left(2 * static_cast<long>(n) + 2)) break;

    const double h = cfg.grad_h * (1.0 + norm(p));
    std::vector<double> g = fd_gradient(eval, p, h);
    if (norm(g) <= cfg.grad_tol) break;

    if (!have_dir) {
      dir.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
      have_dir = true;
    } else {
      double beta = 0.0;
      try {
        beta = pr_beta(g, grad);
      } catch (const ZeroGradient&) {
        break;
      }
      double descent = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dir[i] = -g[i] + beta * dir[i];
        descent += dir[i] * g[i];
      }
      if (descent >= 0.0)
        for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
    }
    grad = g;

    auto phi = [&](double eta) {
      for (std::size_t i = 0; i < n; ++i) probe[i] = p[i] + eta * dir[i];
      return eval(probe);
    };
    LineResult step = minimize_along(phi, j_cur, cfg.line_tol);
    if (step.eta == 0.0) {
      // restart along steepest descent before giving up
      bool already_steepest = true;
      for (std::size_t i = 0; i < n && already_steepest; ++i)
        if (dir[i] != -grad[i]) already_steepest = false;
      if (already_steepest) break;
      for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
      step = minimize_along(phi, j_cur, cfg.line_tol);
      if (step.eta == 0.0) break;
    }
    for (std::size_t i = 0; i < n; ++i) p[i] += step.eta * dir[i];
    clip(p);
    j_cur = step.f;
    res.iters = iter + 1;
    if (j_cur < res.best_j) {
      res.best_j = j_cur;
      res.best = p;
    }
    if (cfg.observer) cfg.observer(iter + 1, res.best_j, res.evals);
  }
  if (cfg.j_stop > 0.0 && res.best_j <= cfg.j_stop) res.reached = true;
  return res;
}

}  // namespace cloudctl

#include "cloudctl/ts.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cloudctl {

double firing_strength(const TsRule& rule, const std::vector<double>& x0) {
  if (x0.size() != rule.input_dim())
    throw std::invalid_argument("firing_strength: input dimension mismatch");
  double w = 1.0;
  for (std::size_t j = 0; j < x0.size(); ++j) w *= rule.antecedents[j].expected_curve(x0[j]);
  return w;
}

FiringVector normalize(const std::vector<double>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw NoRuleFires();
  FiringVector fv;
  fv.w = w;
  fv.h.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) fv.h[i] = w[i] / total;
  return fv;
}

double consequent_sigma(const std::vector<double>& drop_memberships) {
  if (drop_memberships.empty())
    throw std::invalid_argument("consequent_sigma: needs at least one sample");
  const auto [lo, hi] = std::minmax_element(drop_memberships.begin(), drop_memberships.end());
  return *hi - *lo;
}

std::vector<double> sample_consequent(const TsRule& rule, Rng& rng) {
  std::vector<double> a(rule.coeff_means.size());
  a[0] = rule.coeff_means[0];
  for (std::size_t j = 1; j < a.size(); ++j)
    a[j] = rng.normal(rule.coeff_means[j], rule.coeff_sigmas[j]);
  return a;
}

TsModel::TsModel(std::vector<TsRule> rules) : rules_(std::move(rules)) {
  if (rules_.empty()) throw std::invalid_argument("TsModel: needs at least one rule");
  input_dim_ = static_cast<int>(rules_.front().input_dim());
  for (const TsRule& r : rules_) {
    if (static_cast<int>(r.input_dim()) != input_dim_)
      throw std::invalid_argument("TsModel: rules disagree on input dimension");
    if (r.coeff_means.size() != r.input_dim() + 1 || r.coeff_sigmas.size() != r.input_dim() + 1)
      throw std::invalid_argument("TsModel: coefficient vectors must have length n+1");
    for (double s : r.coeff_sigmas)
      if (s < 0.0) throw std::invalid_argument("TsModel: sigmas must be >= 0");
    if (r.coeff_sigmas[0] != 0.0)
      throw std::invalid_argument("TsModel: sigma for a0 must be 0");
  }
}

double TsModel::infer(const std::vector<double>& x0, Rng& rng, InferMode mode,
                      int sigma_drops) const {
  std::vector<double> w(rules_.size());
  for (std::size_t l = 0; l < rules_.size(); ++l) w[l] = firing_strength(rules_[l], x0);
  const FiringVector fv = normalize(w);

  double y = 0.0;
  for (std::size_t l = 0; l < rules_.size(); ++l) {
    const TsRule& rule = rules_[l];
    std::vector<double> a = rule.coeff_means;
    if (mode == InferMode::kStochastic) {
      for (std::size_t j = 1; j < a.size(); ++j) {
        std::vector<double> mus(static_cast<std::size_t>(sigma_drops));
        for (double& mu : mus) mu = rule.antecedents[j - 1].drop(x0[j - 1], rng).mu;
        a[j] = rng.normal(rule.coeff_means[j], consequent_sigma(mus));
      }
    }
    double yl = a[0];
    for (std::size_t j = 0; j < x0.size(); ++j) yl += a[j + 1] * x0[j];
    y += fv.h[l] * yl;
  }
  return y;
}

}  // namespace cloudctl

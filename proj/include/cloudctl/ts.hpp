#pragma once

#include <cstddef>
#include <vector>

#include "cloudctl/cloud.hpp"
#include "cloudctl/errors.hpp"
#include "cloudctl/rng.hpp"

namespace cloudctl {

// One T-S rule: triangular-cloud antecedents and a linear consequent
// y = a0 + a1*x1 + ... + an*xn whose coefficients are gaussian around
// coeff_means. coeff_sigmas[0] is forced to zero: a0 is never randomized.
struct TsRule {
  std::vector<TriangularCloud> antecedents;
  std::vector<double> coeff_means;   // size n+1
  std::vector<double> coeff_sigmas;  // size n+1, entry 0 == 0

  std::size_t input_dim() const { return antecedents.size(); }
};

// Raw firing strengths and their normalized weights (h = w / sum(w)).
struct FiringVector {
  std::vector<double> w;
  std::vector<double> h;
};

enum class InferMode { kDeterministic, kStochastic };

// Product of antecedent expected-curve memberships at x0, in [0, 1].
double firing_strength(const TsRule& rule, const std::vector<double>& x0);

// h_l = w_l / sum(w); throws NoRuleFires when sum(w) == 0.
FiringVector normalize(const std::vector<double>& w);

// max - min of the sampled membership degrees; the consequent sigma of one
// antecedent at one stimulus.
double consequent_sigma(const std::vector<double>& drop_memberships);

// a0 = mean0 exactly; a_j ~ N(mean_j, sigma_j) using the rule's stored sigmas.
std::vector<double> sample_consequent(const TsRule& rule, Rng& rng);

class TsModel {
 public:
  explicit TsModel(std::vector<TsRule> rules);

  int input_dim() const { return input_dim_; }
  const std::vector<TsRule>& rules() const { return rules_; }

  // Weighted T-S output sum(h_l * y_l). Deterministic mode evaluates the
  // consequents at coeff_means. Stochastic mode re-derives each sigma_j from
  // sigma_drops membership drops of antecedent j at the current input
  // (sigma = max - min) and samples the coefficients around their means,
  // which makes He = 0 collapse exactly onto the deterministic output.
  double infer(const std::vector<double>& x0, Rng& rng, InferMode mode,
               int sigma_drops = 100) const;

 private:
  std::vector<TsRule> rules_;
  int input_dim_;
};

}  // namespace cloudctl

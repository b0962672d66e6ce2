#include <doctest.h>

#include <cmath>

#include "cloudctl/ts.hpp"

using namespace cloudctl;

namespace {

TsRule make_rule(std::vector<TriangularCloud> ants, std::vector<double> means,
                 std::vector<double> sigmas = {}) {
  TsRule rule;
  rule.antecedents = std::move(ants);
  rule.coeff_means = std::move(means);
  rule.coeff_sigmas = sigmas.empty() ? std::vector<double>(rule.coeff_means.size(), 0.0)
                                     : std::move(sigmas);
  return rule;
}

}  // namespace

TEST_CASE("firing strength is the product of memberships") {
  const TsRule rule = make_rule({TriangularCloud(0.0, 1.0, 0.0), TriangularCloud(0.0, 1.0, 0.0)},
                                {0.0, 1.0, 1.0});
  CHECK(firing_strength(rule, {0.5, 0.6}) == doctest::Approx(0.5 * 0.4).epsilon(1e-15));
  CHECK(firing_strength(rule, {0.0, 0.0}) == 1.0);
  CHECK(firing_strength(rule, {2.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(firing_strength(rule, {0.5}), std::invalid_argument);
}

TEST_CASE("normalize") {
  SUBCASE("equal weights") {
    const FiringVector fv = normalize({0.2, 0.2});
    CHECK(fv.h[0] == doctest::Approx(0.5));
    CHECK(fv.h[1] == doctest::Approx(0.5));
  }
  SUBCASE("single rule") {
    CHECK(normalize({0.3}).h[0] == doctest::Approx(1.0));
  }
  SUBCASE("all zero is an error") {
    CHECK_THROWS_AS(normalize({0.0, 0.0}), NoRuleFires);
  }
}

TEST_CASE("consequent sigma is the sample range") {
  CHECK(consequent_sigma({0.5, 0.5, 0.5}) == 0.0);
  CHECK(consequent_sigma({0.4, 0.7, 0.5}) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(consequent_sigma({}), std::invalid_argument);
}

TEST_CASE("consequent sigma of drops stays within the envelope band") {
  const TriangularCloud c(0.0, 1.0, 0.1);
  Rng rng(99);
  const double x = 0.3;
  std::vector<double> mus(1000);
  for (double& mu : mus) mu = c.drop(x, rng).mu;
  const double sigma = consequent_sigma(mus);
  const Envelope env = c.envelope(x);
  CHECK(sigma > 0.0);
  CHECK(sigma <= env.y2 - env.y1);
}

TEST_CASE("sample_consequent") {
  const TsRule rule = make_rule({TriangularCloud(0.0, 1.0, 0.1)}, {2.0, 3.0}, {0.0, 0.5});
  SUBCASE("a0 is never randomized") {
    for (std::uint64_t seed : {1u, 2u, 99u}) {
      Rng rng(seed);
      CHECK(sample_consequent(rule, rng)[0] == 2.0);
    }
  }
  SUBCASE("zero sigma returns the mean exactly") {
    const TsRule flat = make_rule({TriangularCloud(0.0, 1.0, 0.0)}, {2.0, 3.0});
    Rng rng(5);
    const auto a = sample_consequent(flat, rng);
    CHECK(a[0] == 2.0);
    CHECK(a[1] == 3.0);
  }
  SUBCASE("sample mean approaches the coefficient mean") {
    Rng rng(2024);
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) sum += sample_consequent(rule, rng)[1];
    CHECK(std::abs(sum / n - 3.0) < 3.0 * 0.5 / 100.0);  // 3 sigma / sqrt(10^4)
  }
}

TEST_CASE("inference identities") {
  Rng rng(1);
  SUBCASE("single rule passes its consequent through") {
    const TsModel model({make_rule({TriangularCloud(0.0, 1.0, 0.0)}, {2.0, 0.0})});
    CHECK(model.infer({0.5}, rng, InferMode::kDeterministic) == doctest::Approx(2.0));
  }
  SUBCASE("two rules with equal firing average their consequents") {
    const TsModel model({make_rule({TriangularCloud(-0.5, 1.0, 0.0)}, {1.0, 0.0}),
                         make_rule({TriangularCloud(0.5, 1.0, 0.0)}, {3.0, 0.0})});
    CHECK(model.infer({0.0}, rng, InferMode::kDeterministic) == doctest::Approx(2.0));
  }
  SUBCASE("weighted sum with firing 1:2:1 and consequents 0,1,2") {
    // all three rules peak elsewhere: choose antecedents so w = (1,2,1)/scale
    const TsModel model({make_rule({TriangularCloud(0.0, 1.0, 0.0)}, {0.0, 0.0}),
                         make_rule({TriangularCloud(0.5, 1.0, 0.0)}, {1.0, 0.0}),
                         make_rule({TriangularCloud(1.0, 1.0, 0.0)}, {2.0, 0.0})});
    // at x = 0.5: w = (0.5, 1.0, 0.5) which has the 1:2:1 ratios
    CHECK(model.infer({0.5}, rng, InferMode::kDeterministic) == doctest::Approx(1.0));
  }
  SUBCASE("no rule fires propagates") {
    const TsModel model({make_rule({TriangularCloud(0.0, 0.5, 0.0)}, {1.0, 0.0})});
    CHECK_THROWS_AS(model.infer({0.9}, rng, InferMode::kDeterministic), NoRuleFires);
  }
}

TEST_CASE("deterministic inference is convex in the firing consequents") {
  Rng rng(77);
  Rng gen(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<TsRule> rules;
    const int r = 1 + static_cast<int>(gen.next_u64() % 4);
    double lo = 1e9, hi = -1e9;
    for (int l = 0; l < r; ++l) {
      const double a0 = gen.uniform(-5.0, 5.0);
      rules.push_back(make_rule({TriangularCloud(gen.uniform(-0.5, 0.5), 2.0, 0.0)}, {a0, 0.0}));
      lo = std::min(lo, a0);
      hi = std::max(hi, a0);
    }
    const TsModel model(std::move(rules));
    const double y = model.infer({0.25}, rng, InferMode::kDeterministic);
    CHECK(y >= lo - 1e-12);
    CHECK(y <= hi + 1e-12);
  }
}

TEST_CASE("normalized weights sum to one on random models") {
  Rng gen(8);
  for (int trial = 0; trial < 1000; ++trial) {
    const int r = 1 + static_cast<int>(gen.next_u64() % 5);
    std::vector<double> w(static_cast<std::size_t>(r));
    for (double& v : w) v = gen.uniform(0.0, 1.0) + 1e-6;
    const FiringVector fv = normalize(w);
    double sum = 0.0;
    for (double h : fv.h) {
      CHECK(h >= 0.0);
      sum += h;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("He = 0 makes stochastic and deterministic inference agree exactly") {
  const TsModel model({make_rule({TriangularCloud(0.0, 1.0, 0.0)}, {2.0, 1.5}),
                       make_rule({TriangularCloud(0.3, 1.0, 0.0)}, {-1.0, 0.5})});
  for (std::uint64_t seed : {1u, 7u, 123u, 9999u}) {
    Rng det(seed), sto(seed);
    const double a = model.infer({0.2}, det, InferMode::kDeterministic);
    const double b = model.infer({0.2}, sto, InferMode::kStochastic);
    CHECK(a == b);
  }
}

TEST_CASE("rule order does not change the deterministic output") {
  const TsRule r1 = make_rule({TriangularCloud(-0.2, 1.0, 0.0)}, {1.0, 0.2});
  const TsRule r2 = make_rule({TriangularCloud(0.4, 1.5, 0.0)}, {-0.5, 0.1});
  const TsRule r3 = make_rule({TriangularCloud(0.0, 2.0, 0.0)}, {0.7, -0.3});
  Rng rng(3);
  const double y123 = TsModel({r1, r2, r3}).infer({0.1}, rng, InferMode::kDeterministic);
  const double y312 = TsModel({r3, r1, r2}).infer({0.1}, rng, InferMode::kDeterministic);
  const double y231 = TsModel({r2, r3, r1}).infer({0.1}, rng, InferMode::kDeterministic);
  CHECK(y123 == doctest::Approx(y312).epsilon(1e-15));
  CHECK(y123 == doctest::Approx(y231).epsilon(1e-15));
}

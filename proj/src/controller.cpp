#include "cloudctl/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cloudctl {

int param_count(int m1, int m2, int o) {
  if (m1 < 1 || m2 < 1 || o < 1) throw std::invalid_argument("param_count: sizes must be >= 1");
  return m1 * 3 + m2 * 3 + o + 4 + m1 * m2;
}

SearchSpace controller_search_space(const ControllerStructure& s) {
  // alphas live in the open interval (0,1); the inset keeps boundary
  // candidates decodable (en = 0 is not a valid cloud)
  constexpr double kInset = 1e-6;
  SearchSpace space;
  space.gamma = param_count(s.m1, s.m2, s.o);
  space.bounds.assign(static_cast<std::size_t>(space.gamma), {kInset, 1.0 - kInset});
  return space;
}

double decode_bipolar(double alpha) { return -2.0 * alpha + 1.0; }

int decode_count(double alpha) {
  return std::clamp(static_cast<int>(std::lround(20.0 * alpha)), 1, 20);
}

int decode_rule_slot(double alpha, int o) {
  return std::clamp(static_cast<int>(std::lround(o * alpha)), 1, o);
}

ControllerParams decode(const std::vector<double>& alphas, const ControllerStructure& s,
                        double u_bound) {
  const int gamma = param_count(s.m1, s.m2, s.o);
  if (static_cast<int>(alphas.size()) != gamma)
    throw std::invalid_argument("decode: alpha vector length does not match the structure");
  if (!(u_bound > 0.0)) throw std::invalid_argument("decode: u_bound must be > 0");

  ControllerParams p;
  p.m1 = s.m1;
  p.m2 = s.m2;
  p.o = s.o;

  std::size_t idx = 0;
  auto take = [&](int count, auto&& map) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (double& v : out) v = map(alphas[idx++]);
    return out;
  };
  // He < En/3 keeps every decoded cloud constructible.
  auto clamp_he = [](double he, double en) { return std::min(he, en / 3.0 * (1.0 - 1e-9)); };

  p.ex1 = take(s.m1, decode_bipolar);
  p.en1 = take(s.m1, [](double a) { return a; });
  p.he1 = take(s.m1, [](double a) { return a; });
  p.ex2 = take(s.m2, decode_bipolar);
  p.en2 = take(s.m2, [](double a) { return a; });
  p.he2 = take(s.m2, [](double a) { return a; });
  p.exu = take(s.o, decode_bipolar);
  for (int i = 0; i < s.m1; ++i) p.he1[i] = clamp_he(p.he1[i], p.en1[i]);
  for (int i = 0; i < s.m2; ++i) p.he2[i] = clamp_he(p.he2[i], p.en2[i]);

  // Count slots decode by the table but the operative sizes are fixed by s.
  (void)decode_count(alphas[idx++]);  // m1 slot
  (void)decode_count(alphas[idx++]);  // m2 slot
  (void)decode_count(alphas[idx++]);  // o slot
  p.ku = u_bound * alphas[idx++];

  p.rl.resize(static_cast<std::size_t>(s.m1) * s.m2);
  for (int& entry : p.rl) entry = decode_rule_slot(alphas[idx++], s.o);
  return p;
}

namespace {

struct CloudTriple {
  double ex, en, he;
};

// Sorts by Ex and widens En just enough that the open supports
// (Ex - En, Ex + En) jointly cover [-1, 1].
std::vector<TriangularCloud> build_covering_family(std::vector<CloudTriple> triples) {
  constexpr double kSlack = 1e-6;
  std::stable_sort(triples.begin(), triples.end(),
                   [](const CloudTriple& a, const CloudTriple& b) { return a.ex < b.ex; });
  double cover = -1.0;
  for (CloudTriple& t : triples) {
    if (t.ex - t.en > cover - kSlack) t.en = t.ex - cover + kSlack;
    cover = std::max(cover, t.ex + t.en - kSlack);
  }
  CloudTriple& last = triples.back();
  if (cover < 1.0) last.en = std::max(last.en, 1.0 - last.ex + kSlack);

  std::vector<TriangularCloud> family;
  family.reserve(triples.size());
  for (const CloudTriple& t : triples) family.emplace_back(t.ex, t.en, t.he);
  return family;
}

std::vector<CloudTriple> zip(const std::vector<double>& ex, const std::vector<double>& en,
                             const std::vector<double>& he) {
  std::vector<CloudTriple> out(ex.size());
  for (std::size_t i = 0; i < ex.size(); ++i) out[i] = {ex[i], en[i], he[i]};
  return out;
}

}  // namespace

CloudController::CloudController(const ControllerParams& params, double u_min, double u_max)
    : singletons_(params.exu), ku_(params.ku), u_min_(u_min), u_max_(u_max) {
  const std::size_t m1 = static_cast<std::size_t>(params.m1);
  const std::size_t m2 = static_cast<std::size_t>(params.m2);
  if (params.ex1.size() != m1 || params.en1.size() != m1 || params.he1.size() != m1 ||
      params.ex2.size() != m2 || params.en2.size() != m2 || params.he2.size() != m2 ||
      params.exu.size() != static_cast<std::size_t>(params.o) || params.rl.size() != m1 * m2)
    throw std::invalid_argument("CloudController: parameter vector lengths are inconsistent");
  if (!(params.ku > 0.0)) throw std::invalid_argument("CloudController: ku must be > 0");
  if (!(u_min < u_max)) throw std::invalid_argument("CloudController: requires u_min < u_max");

  front1_ = build_covering_family(zip(params.ex1, params.en1, params.he1));
  front2_ = build_covering_family(zip(params.ex2, params.en2, params.he2));

  table_.resize(m1 * m2);
  for (std::size_t k = 0; k < table_.size(); ++k) {
    const int entry = params.rl[k];
    if (entry < 1 || entry > params.o)
      throw std::invalid_argument("CloudController: rule-table entry outside [1, o]");
    table_[k] = entry - 1;
  }
}

double CloudController::control(double e, double de) const {
  std::vector<double> mu1(front1_.size()), mu2(front2_.size());
  for (std::size_t i = 0; i < front1_.size(); ++i) mu1[i] = front1_[i].expected_curve(e);
  for (std::size_t j = 0; j < front2_.size(); ++j) mu2[j] = front2_[j].expected_curve(de);

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < front1_.size(); ++i) {
    if (mu1[i] == 0.0) continue;
    for (std::size_t j = 0; j < front2_.size(); ++j) {
      const double w = mu1[i] * mu2[j];
      num += w * singletons_[static_cast<std::size_t>(table_[i * front2_.size() + j])];
      den += w;
    }
  }
  if (!(den > 0.0)) throw NoRuleFires();
  return std::clamp(ku_ * (num / den), u_min_, u_max_);
}

}  // namespace cloudctl

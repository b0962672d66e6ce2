#pragma once

#include <utility>
#include <vector>

#include "cloudctl/cloud.hpp"
#include "cloudctl/errors.hpp"

namespace cloudctl {

// Partition sizes of the 2-input/1-output controller: m1 clouds over the
// error input, m2 over the error-change input, o output singletons.
struct ControllerStructure {
  int m1 = 3;
  int m2 = 3;
  int o = 5;
};

// gamma = 3*m1 + 3*m2 + o + 4 + m1*m2
int param_count(int m1, int m2, int o);

struct SearchSpace {
  int gamma = 0;
  std::vector<std::pair<double, double>> bounds;
};

// Search space of the flat encoded vector: gamma variables, each in (0, 1).
SearchSpace controller_search_space(const ControllerStructure& s);

// Decoded controller parameters. Vector slots are laid out as
// [ex1 | en1 | he1 | ex2 | en2 | he2 | exu | m1 m2 o ku | rl...].
struct ControllerParams {
  std::vector<double> ex1, en1, he1;  // size m1
  std::vector<double> ex2, en2, he2;  // size m2
  std::vector<double> exu;            // size o
  int m1 = 0, m2 = 0, o = 0;
  std::vector<int> rl;  // size m1*m2, entries in [1, o]
  double ku = 1.0;
};

// Slot mappings of the encoding table.
double decode_bipolar(double alpha);            // -2*alpha + 1, for Ex-type slots
int decode_count(double alpha);                 // round(20*alpha) clamped to [1, 20]
int decode_rule_slot(double alpha, int o);      // round(o*alpha) clamped to [1, o]

// Maps a flat alpha vector in (0,1)^gamma onto controller parameters.
// Ex-type slots and singletons map by -2a+1; En/He slots by a; the rule
// table by round(o*a); the output gain by u_bound*a (no rounding). He is
// clamped so that 3*He < En holds for every decoded cloud. The three count
// slots decode by round(20*a) but the operative sizes come from `s`, which
// fixes gamma before the search starts.
ControllerParams decode(const std::vector<double>& alphas, const ControllerStructure& s,
                        double u_bound);

// Rule-table controller with triangular-cloud fronts and single-point
// consequents. Construction sorts each front family by Ex and widens
// entropies minimally so the supports jointly cover [-1, 1]; without that,
// decoded partitions can leave dead zones where no rule fires.
class CloudController {
 public:
  CloudController(const ControllerParams& params, double u_min, double u_max);

  // Fires all m1*m2 rules at (e, de) with w_ij = mu1_i(e)*mu2_j(de),
  // blends the singletons by normalized weights and applies the output
  // gain and saturation. Inputs are expected in [-1, 1].
  double control(double e, double de) const;

  const std::vector<TriangularCloud>& front1() const { return front1_; }
  const std::vector<TriangularCloud>& front2() const { return front2_; }
  const std::vector<double>& singletons() const { return singletons_; }
  int table_at(int i, int j) const { return table_[static_cast<std::size_t>(i) * front2_.size() + j]; }
  double ku() const { return ku_; }
  double u_min() const { return u_min_; }
  double u_max() const { return u_max_; }

 private:
  std::vector<TriangularCloud> front1_, front2_;
  std::vector<double> singletons_;
  std::vector<int> table_;  // 0-based singleton indices, row-major m1 x m2
  double ku_;
  double u_min_, u_max_;
};

}  // namespace cloudctl

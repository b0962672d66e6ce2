#pragma once

#include "cloudctl/rng.hpp"

namespace cloudctl {

// One sampled (stimulus, membership) pair from a cloud generator.
struct CloudDrop {
  double x;
  double mu;
};

// Lower/upper envelope values at one stimulus. y1 is the steep curve built
// on |En - 3He|, y2 the shallow curve built on |En + 3He|; between the peak
// and the narrow support's edge y1 <= y2.
struct Envelope {
  double y1;
  double y2;
};

// Triangular cloud model A(Ex, En, He). The expected curve is the triangle
// 1 - |x - Ex|/En; each drop perturbs En by a clamped gaussian so membership
// becomes a random value inside the envelope band.
//
// Construction requires en > 0, he >= 0 and 3*he < en, so that En - 3He > 0
// and both envelope denominators are nonzero.
class TriangularCloud {
 public:
  TriangularCloud(double ex, double en, double he);

  double ex() const { return ex_; }
  double en() const { return en_; }
  double he() const { return he_; }

  // max(0, 1 - |x - Ex|/En), in [0, 1]; equals 1 iff x == Ex.
  double expected_curve(double x) const;

  // Samples En' ~ N(En, He) clamped to [En - 3He, En + 3He] and evaluates
  // the triangle with that width. With He = 0 this is the expected curve.
  CloudDrop drop(double x, Rng& rng) const;

  Envelope envelope(double x) const;

  // |y1 - y2| at x.
  double width(double x) const;

  // Maximum width per the cloud-width bound evaluated at the mu = 1/3
  // level of the steep curve:
  //   d0 = 1 - (2/3) * |En - 3He| / |En + 3He| - 1/3,  in [0, 2/3).
  double max_width() const;

 private:
  double ex_;
  double en_;
  double he_;
};

}  // namespace cloudctl

#include "cloudctl/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cloudctl {

TriangularCloud::TriangularCloud(double ex, double en, double he) : ex_(ex), en_(en), he_(he) {
  if (!(en > 0.0)) throw std::invalid_argument("TriangularCloud: en must be > 0");
  if (!(he >= 0.0)) throw std::invalid_argument("TriangularCloud: he must be >= 0");
  if (!(3.0 * he < en)) throw std::invalid_argument("TriangularCloud: requires 3*he < en");
}

double TriangularCloud::expected_curve(double x) const {
  return std::max(0.0, 1.0 - std::abs(x - ex_) / en_);
}

CloudDrop TriangularCloud::drop(double x, Rng& rng) const {
  double en_prime = rng.normal(en_, he_);
  en_prime = std::clamp(en_prime, en_ - 3.0 * he_, en_ + 3.0 * he_);
  const double mu = std::max(0.0, 1.0 - std::abs(x - ex_) / en_prime);
  return CloudDrop{x, mu};
}

Envelope TriangularCloud::envelope(double x) const {
  const double t = std::abs(x - ex_);
  const double narrow = std::abs(en_ - 3.0 * he_);
  const double wide = std::abs(en_ + 3.0 * he_);
  return Envelope{std::max(0.0, 1.0 - t / narrow), std::max(0.0, 1.0 - t / wide)};
}

double TriangularCloud::width(double x) const {
  const Envelope env = envelope(x);
  return std::abs(env.y1 - env.y2);
}

double TriangularCloud::max_width() const {
  const double narrow = std::abs(en_ - 3.0 * he_);
  const double wide = std::abs(en_ + 3.0 * he_);
  return 1.0 - (2.0 / 3.0) * narrow / wide - 1.0 / 3.0;
}

}  // namespace cloudctl

#include "cloudctl/plant.hpp"

#include <algorithm>
#include <cmath>

#include "cloudctl/rng.hpp"

namespace cloudctl {

double ReferenceSignal::value(int k) const {
  switch (type) {
    case Type::kStep:
      return k >= 1 ? amplitude : 0.0;
    case Type::kConstant:
      return amplitude;
    case Type::kSquare: {
      const int half = std::max(1, period / 2);
      return ((k - 1) / half) % 2 == 0 ? amplitude : -amplitude;
    }
  }
  return 0.0;
}

double plant_step(const ArxPlant& plant, const std::vector<double>& y_hist,
                  const std::vector<double>& u_hist, double noise) {
  if (y_hist.size() < plant.a.size() || u_hist.size() < plant.b.size())
    throw std::invalid_argument("plant_step: history shorter than coefficient vector");
  double y = noise;
  for (std::size_t i = 0; i < plant.a.size(); ++i) y += plant.a[i] * y_hist[i];
  for (std::size_t j = 0; j < plant.b.size(); ++j) y += plant.b[j] * u_hist[j];
  return y;
}

SimTrace run_closed_loop(const ArxPlant& plant, const CloudController* controller,
                         const ReferenceSignal& ref, const LoopOptions& opts, std::uint64_t seed) {
  if (opts.steps < 1) throw std::invalid_argument("run_closed_loop: steps must be >= 1");
  Rng rng(seed);

  std::vector<double> y_hist(plant.a.size(), 0.0);
  std::vector<double> u_hist(plant.b.size(), 0.0);
  SimTrace trace;
  trace.dt = opts.dt;
  trace.rows.reserve(static_cast<std::size_t>(opts.steps));

  double y_meas = 0.0;
  double prev_e = 0.0;
  for (int k = 1; k <= opts.steps; ++k) {
    const double r = ref.value(k);
    const double e = r - y_meas;
    const double de = e - prev_e;
    prev_e = e;

    double u = 0.0;
    if (controller != nullptr) {
      const double e_norm = std::clamp(e * opts.e_gain, -1.0, 1.0);
      const double de_norm = std::clamp(de * opts.de_gain, -1.0, 1.0);
      u = controller->control(e_norm, de_norm);
    }
    trace.rows.push_back(TraceRow{k, r, y_meas, u, e});

    // y(k) sees u(k-1) as its most recent input; u(k) enters at k+1.
    const double noise = plant.noise_std > 0.0 ? rng.normal(0.0, plant.noise_std) : 0.0;
    const double y_next = plant_step(plant, y_hist, u_hist, noise);
    if (!(std::abs(y_next) <= opts.overflow)) throw DivergedRun(std::move(trace), k);
    if (!u_hist.empty()) {
      std::rotate(u_hist.rbegin(), u_hist.rbegin() + 1, u_hist.rend());
      u_hist[0] = u;
    }
    if (!y_hist.empty()) {
      std::rotate(y_hist.rbegin(), y_hist.rbegin() + 1, y_hist.rend());
      y_hist[0] = y_next;
    }
    y_meas = y_next;
  }
  return trace;
}

double j1(const SimTrace& trace) {
  double sum = 0.0;
  for (const TraceRow& row : trace.rows)
    sum += static_cast<double>(row.k) * row.k * std::abs(row.e) * trace.dt;
  return sum;
}

double j2(double e) { return 0.5 * e * e; }

}  // namespace cloudctl

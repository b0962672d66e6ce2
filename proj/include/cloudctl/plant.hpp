#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cloudctl/controller.hpp"

namespace cloudctl {

// Discrete ARX plant
//   y(k) = sum_i a_i y(k-i) + sum_j b_j u(k-j) + noise(k)
// with gaussian noise of standard deviation noise_std.
struct ArxPlant {
  std::vector<double> a;
  std::vector<double> b;
  double noise_std = 0.0;
};

struct TraceRow {
  int k;
  double r, y, u, e;
};

// Time-indexed closed-loop record; every row satisfies e = r - y.
struct SimTrace {
  double dt = 1.0;
  std::vector<TraceRow> rows;
};

// Thrown when |y| exceeds the overflow bound; carries the rows produced so far.
struct DivergedRun : std::runtime_error {
  DivergedRun(SimTrace trace, int step)
      : std::runtime_error("closed-loop run diverged at step " + std::to_string(step)),
        partial(std::move(trace)),
        k(step) {}
  SimTrace partial;
  int k;
};

struct ReferenceSignal {
  enum class Type { kStep, kConstant, kSquare };
  Type type = Type::kStep;
  double amplitude = 1.0;
  int period = 40;  // square wave only

  double value(int k) const;
};

struct LoopOptions {
  int steps = 200;
  double dt = 1.0;
  double e_gain = 1.0;   // scales e into the controller's [-1, 1] domain
  double de_gain = 1.0;  // scales de likewise
  double overflow = 1e9;
};

// y_hist[0] = y(k-1), u_hist[0] = u(k-1); histories may be longer than the
// coefficient vectors but not shorter.
double plant_step(const ArxPlant& plant, const std::vector<double>& y_hist,
                  const std::vector<double>& u_hist, double noise);

// Runs the loop for opts.steps samples. At each k the last computed output is
// measured, e(k) = r(k) - y_meas, the controller (null = zero actuation) maps
// the normalized (e, de) to u(k), and the plant advances with seeded noise.
// Rows store the measured output, so e = r - y holds per row. Throws
// DivergedRun when |y| exceeds opts.overflow.
SimTrace run_closed_loop(const ArxPlant& plant, const CloudController* controller,
                         const ReferenceSignal& ref, const LoopOptions& opts, std::uint64_t seed);

// J1 = sum_k k^2 |e(k)| dt, k starting at 1.
double j1(const SimTrace& trace);

// J2 = e^2 / 2.
double j2(double e);

}  // namespace cloudctl

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cloudctl/plant.hpp"
#include "cloudctl/rng.hpp"

using namespace cloudctl;

namespace {

const ArxPlant kPaperPlant{{3.737, -4.212, 1.492}, {0.17, -0.238, 2.94}, 0.0};
const ArxPlant kDemoPlant{{0.5}, {1.0}, 0.0};  // y(k) = 0.5 y(k-1) + u(k-1)

}  // namespace

TEST_CASE("plant_step recursion oracles") {
  CHECK(plant_step(kPaperPlant, {0, 0, 0}, {0, 0, 0}, 0.0) == 0.0);
  CHECK(plant_step(kPaperPlant, {1, 0, 0}, {0, 0, 0}, 0.0) == doctest::Approx(3.737));
  CHECK(plant_step(kPaperPlant, {0, 0, 0}, {1, 0, 0}, 0.0) == doctest::Approx(0.17));
  CHECK(plant_step(kPaperPlant, {0, 1, 0}, {0, 0, 1}, 0.5) ==
        doctest::Approx(-4.212 + 2.94 + 0.5));
  CHECK_THROWS_AS(plant_step(kPaperPlant, {0, 0}, {0, 0, 0}, 0.0), std::invalid_argument);
}

TEST_CASE("the paper plant's autoregressive part is unstable") {
  // companion-matrix roots of z^3 - 3.737 z^2 + 4.212 z - 1.492
  Eigen::Matrix3d companion;
  companion << 3.737, -4.212, 1.492, 1, 0, 0, 0, 1, 0;
  const auto roots = companion.eigenvalues();
  double max_mag = 0.0;
  for (int i = 0; i < 3; ++i) max_mag = std::max(max_mag, std::abs(roots(i)));
  CHECK(max_mag > 1.0);
  CHECK(max_mag == doctest::Approx(2.0124).epsilon(1e-3));
}

TEST_CASE("zero equilibrium") {
  ReferenceSignal ref;
  ref.type = ReferenceSignal::Type::kConstant;
  ref.amplitude = 0.0;
  LoopOptions opts;
  opts.steps = 50;
  const SimTrace trace = run_closed_loop(kDemoPlant, nullptr, ref, opts, 7);
  for (const TraceRow& row : trace.rows) {
    CHECK(row.y == 0.0);
    CHECK(row.u == 0.0);
    CHECK(row.e == 0.0);
  }
}

TEST_CASE("same seed gives bit-identical traces") {
  ArxPlant noisy = kDemoPlant;
  noisy.noise_std = 1.0;
  ReferenceSignal ref;
  LoopOptions opts;
  opts.steps = 100;
  const SimTrace a = run_closed_loop(noisy, nullptr, ref, opts, 42);
  const SimTrace b = run_closed_loop(noisy, nullptr, ref, opts, 42);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].y == b.rows[i].y);
    CHECK(a.rows[i].u == b.rows[i].u);
    CHECK(a.rows[i].e == b.rows[i].e);
  }
}

TEST_CASE("rows satisfy e = r - y") {
  ArxPlant noisy = kDemoPlant;
  noisy.noise_std = 0.5;
  ReferenceSignal ref;
  LoopOptions opts;
  opts.steps = 80;
  const SimTrace trace = run_closed_loop(noisy, nullptr, ref, opts, 3);
  for (const TraceRow& row : trace.rows) CHECK(row.e == row.r - row.y);
  // k contiguous from 1
  for (std::size_t i = 0; i < trace.rows.size(); ++i)
    CHECK(trace.rows[i].k == static_cast<int>(i) + 1);
}

TEST_CASE("unstable paper plant with zero controller trips the divergence guard") {
  ArxPlant plant = kPaperPlant;
  plant.noise_std = 1.0;
  ReferenceSignal ref;
  LoopOptions opts;
  opts.steps = 200;
  CHECK_THROWS_AS(run_closed_loop(plant, nullptr, ref, opts, 1), DivergedRun);
}

TEST_CASE("divergence carries the partial trace") {
  ArxPlant plant = kPaperPlant;
  plant.noise_std = 1.0;
  ReferenceSignal ref;
  LoopOptions opts;
  opts.steps = 200;
  try {
    run_closed_loop(plant, nullptr, ref, opts, 11);
    FAIL("expected DivergedRun");
  } catch (const DivergedRun& d) {
    CHECK(d.partial.rows.size() > 0);
    CHECK(d.partial.rows.size() < 200);
    CHECK(d.k == static_cast<int>(d.partial.rows.size()));
  }
}

TEST_CASE("j1 oracle values") {
  SimTrace trace;
  trace.dt = 1.0;
  trace.rows = {{1, 1, 0, 0, 1}, {2, 1, 0, 0, 1}};
  CHECK(j1(trace) == doctest::Approx(5.0));  // 1^2*1 + 2^2*1

  SimTrace zero;
  zero.rows = {{1, 0, 0, 0, 0}, {2, 0, 0, 0, 0}};
  CHECK(j1(zero) == 0.0);

  SimTrace doubled = trace;
  for (TraceRow& row : doubled.rows) row.e *= 2.0;
  CHECK(j1(doubled) == doctest::Approx(2.0 * j1(trace)));
}

TEST_CASE("j1 strictly increases when a nonzero-error row is appended") {
  SimTrace trace;
  trace.dt = 0.5;
  trace.rows = {{1, 1, 0.5, 0, 0.5}};
  const double before = j1(trace);
  trace.rows.push_back({2, 1, 0.9, 0, 0.1});
  CHECK(j1(trace) > before);
}

TEST_CASE("j2") {
  CHECK(j2(2.0) == doctest::Approx(2.0));
  CHECK(j2(0.0) == 0.0);
  CHECK(j2(-2.0) == doctest::Approx(2.0));
}

TEST_CASE("noise statistics match N(0,1)") {
  Rng rng(31415);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal(0.0, 1.0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("reference signals") {
  ReferenceSignal step;
  CHECK(step.value(1) == 1.0);
  CHECK(step.value(100) == 1.0);
  ReferenceSignal square;
  square.type = ReferenceSignal::Type::kSquare;
  square.period = 4;
  CHECK(square.value(1) == 1.0);
  CHECK(square.value(2) == 1.0);
  CHECK(square.value(3) == -1.0);
  CHECK(square.value(4) == -1.0);
  CHECK(square.value(5) == 1.0);
}

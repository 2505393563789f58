#include <doctest.h>

#include <cmath>

#include "framesub/bss.hpp"
#include "test_support.hpp"

using namespace framesub;
using namespace framesub::testing;

TEST_CASE("kappa values") {
  CHECK(kappa(2.0, 2.0) == doctest::Approx(1.0));
  CHECK(kappa(1.0, 3.0) == doctest::Approx(2.0 + std::sqrt(3.0)));
  CHECK(kappa(1.0, 2.0) == doctest::Approx(1.5 + std::sqrt(1.25)));
  CHECK_THROWS_AS(kappa(0.0, 1.0), Error);
  CHECK_THROWS_AS(kappa(2.0, 1.0), Error);
}

TEST_CASE("gamma values") {
  CHECK(gamma_factor(4.0, 1.0) == doctest::Approx(9.0));
  CHECK(gamma_factor(9.0, 1.0) == doctest::Approx(4.0));
  // kappa = 1 reduces gamma to (sqrt(b)+1)^2/(sqrt(b)-1)^2
  const double b = 2.7;
  const double s = std::sqrt(b);
  CHECK(gamma_factor(b, 1.0) == doctest::Approx((s + 1) * (s + 1) / ((s - 1) * (s - 1))));
  CHECK_THROWS_AS(gamma_factor(1.0, 1.0), Error);
  CHECK_THROWS_AS(gamma_factor(3.9, 2.0), Error);
}

TEST_CASE("ceil_count snaps near-integer products") {
  CHECK(ceil_count(1.2 * 20.0) == 24);
  CHECK(ceil_count(1.5 * 189.0) == 284);
  CHECK(ceil_count(1.1 * 169.0) == 186);
  CHECK(ceil_count(4.0) == 4);
  CHECK(ceil_count(4.2) == 5);
}

namespace {

// Rows of I_m twice, scaled so the frame is tight with A = B = 1.
CMatrix doubled_identity_frame(Index m) {
  CMatrix y(2 * m, m);
  y.topRows(m) = CMatrix::Identity(m, m) / std::sqrt(2.0);
  y.bottomRows(m) = CMatrix::Identity(m, m) / std::sqrt(2.0);
  return y;
}

}  // namespace

TEST_CASE("BSS on the doubled identity frame, b = 4") {
  const Index m = 6;
  const CMatrix y = doubled_identity_frame(m);
  BssConfig cfg;
  cfg.b = 4.0;
  cfg.seed = 5;
  const BssResult res = bss_subsample(y, FrameBounds{1.0, 1.0}, cfg);

  CHECK(res.kappa == doctest::Approx(1.0));
  CHECK(res.gamma == doctest::Approx(9.0));
  CHECK(res.iterations == 4 * m);
  CHECK(res.subframe.size() <= 4 * m);
  CHECK(res.subframe.weights.minCoeff() >= 0.0);
  // certified window [A, gamma B] = [1, 9]
  CHECK(res.bounds_out.lower >= 1.0 - 1e-8);
  CHECK(res.bounds_out.upper <= 9.0 + 1e-8);
}

TEST_CASE("BSS certificate on random frames with spread spectra") {
  Rng rng(101);
  for (int trial = 0; trial < 8; ++trial) {
    const Index m = 3 + static_cast<Index>(rng.uniform_index(6));
    const Index count = 2 * m + static_cast<Index>(rng.uniform_index(30));
    RVector singulars(m);
    for (Index i = 0; i < m; ++i) singulars[i] = rng.uniform(1.0, 1.6);
    const CMatrix y = random_frame_with_spectrum(count, m, singulars, rng);
    const FrameBounds bounds = frame_bounds(y);

    BssConfig cfg;
    cfg.b = kappa(bounds.lower, bounds.upper) * kappa(bounds.lower, bounds.upper) +
            rng.uniform(0.5, 3.0);
    cfg.seed = rng.next_u64();
    const BssResult res = bss_subsample(y, bounds, cfg);

    CHECK(res.subframe.size() <= ceil_count(cfg.b * static_cast<double>(m)));
    CHECK(res.bounds_out.lower >= bounds.lower - 1e-8);
    CHECK(res.bounds_out.upper <= res.gamma * bounds.upper + 1e-8);
  }
}

TEST_CASE("BSS trace invariants") {
  Rng rng(211);
  const Index m = 5;
  const Index count = 40;
  RVector singulars(m);
  for (Index i = 0; i < m; ++i) singulars[i] = rng.uniform(1.0, 1.4);
  const CMatrix y = random_frame_with_spectrum(count, m, singulars, rng);
  const FrameBounds bounds = frame_bounds(y);
  const double ratio = bounds.upper / bounds.lower;
  const double kap = kappa(bounds.lower, bounds.upper);

  BssConfig cfg;
  cfg.b = kap * kap + 2.0;
  cfg.delta = 0.0;
  cfg.seed = 3;
  cfg.record_trace = true;
  const BssResult res = bss_subsample(y, bounds, cfg);
  REQUIRE(static_cast<Index>(res.trace.size()) == res.iterations);

  const double s = std::sqrt(cfg.b);
  const double conservation_target = cfg.delta * (1.0 - 1.0 / s);
  double scale = 0.0;

  double prev_eps_lower = 1e300, prev_eps_upper = 1e300;
  double prev_delta_lower = 0.0, prev_delta_upper = 1e300;
  for (const auto& rec : res.trace) {
    // spectrum strictly inside the pending window
    const double slack_low = 1e-10 * std::max(1.0, std::abs(rec.lower_barrier));
    const double slack_up = 1e-10 * std::max(1.0, std::abs(rec.upper_barrier));
    CHECK(rec.lambda_min > rec.lower_barrier - slack_low);
    CHECK(rec.lambda_max < rec.upper_barrier + slack_up);

    // conservation identity (variable shifts keep it exactly)
    const double lhs = 1.0 / rec.delta_lower - kap * rec.eps_lower -
                       ratio * (1.0 / rec.delta_upper + rec.eps_upper);
    if (scale == 0.0)
      scale = 1.0 / rec.delta_lower + kap * rec.eps_lower +
              ratio * (1.0 / rec.delta_upper + rec.eps_upper);
    CHECK(std::abs(lhs - conservation_target) <= 1e-8 * scale);

    // monotone potentials and shifts
    CHECK(rec.eps_lower <= prev_eps_lower * (1 + 1e-12));
    CHECK(rec.eps_upper <= prev_eps_upper * (1 + 1e-12));
    CHECK(rec.delta_lower >= prev_delta_lower * (1 - 1e-12));
    CHECK(rec.delta_upper <= prev_delta_upper * (1 + 1e-12));
    prev_eps_lower = rec.eps_lower;
    prev_eps_upper = rec.eps_upper;
    prev_delta_lower = rec.delta_lower;
    prev_delta_upper = rec.delta_upper;

    // selected gate ordering and harmonic weight
    CHECK(rec.gate_lower >= rec.gate_upper);
    CHECK(rec.gate_upper > 0.0);
    CHECK(rec.weight >= 1.0 / rec.gate_lower - 1e-12);
    CHECK(rec.weight <= 1.0 / rec.gate_upper + 1e-12);
  }

  // final barrier positivity: l^(n) >= -m sqrt(b) kappa + b m > 0
  const double md = static_cast<double>(m);
  CHECK(res.final_lower_barrier >= -md * s * kap + cfg.b * md - 1e-8);
  CHECK(res.final_lower_barrier > 0.0);
}

TEST_CASE("fixed-shift mode keeps the certificate") {
  Rng rng(97);
  const Index m = 4;
  const CMatrix y = random_tight_frame(30, m, rng);
  BssConfig cfg;
  cfg.b = 4.0;
  cfg.seed = 11;
  cfg.fixed_shifts = true;
  cfg.record_trace = true;
  const BssResult res = bss_subsample(y, FrameBounds{1.0, 1.0}, cfg);
  CHECK(res.bounds_out.lower >= 1.0 - 1e-8);
  CHECK(res.bounds_out.upper <= 9.0 + 1e-8);
  for (const auto& rec : res.trace) {
    CHECK(rec.delta_lower == doctest::Approx(res.trace.front().delta_lower));
    CHECK(rec.delta_upper == doctest::Approx(res.trace.front().delta_upper));
    const double slack = 1e-10 * std::max(1.0, std::abs(rec.lower_barrier));
    CHECK(rec.lambda_min > rec.lower_barrier - slack);
    CHECK(rec.lambda_max < rec.upper_barrier + slack);
  }
}

TEST_CASE("duplicate selections accumulate into one weight entry") {
  // Few rows against many iterations forces re-selection.
  const Index m = 2;
  CMatrix y(4, m);
  y << 1.0 / std::sqrt(2.0), 0, 0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0, 0,
      1.0 / std::sqrt(2.0);
  BssConfig cfg;
  cfg.b = 9.0;  // 18 iterations over 4 rows: duplicates guaranteed
  cfg.seed = 2;
  const BssResult res = bss_subsample(y, FrameBounds{1.0, 1.0}, cfg);
  CHECK(res.iterations == 18);
  CHECK(res.subframe.size() <= 4);
  CHECK(res.bounds_out.lower >= 1.0 - 1e-8);
}

TEST_CASE("sequential traversal is deterministic across seeds") {
  Rng rng(303);
  const CMatrix y = random_tight_frame(25, 4, rng);
  BssConfig cfg;
  cfg.b = 4.0;
  cfg.traversal = Traversal::sequential;
  cfg.seed = 1;
  const BssResult a = bss_subsample(y, FrameBounds{1.0, 1.0}, cfg);
  cfg.seed = 999;
  const BssResult b = bss_subsample(y, FrameBounds{1.0, 1.0}, cfg);
  REQUIRE(a.subframe.indices == b.subframe.indices);
  CHECK((a.subframe.weights - b.subframe.weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("seeded permutation varies with the seed") {
  Rng rng(313);
  const CMatrix y = random_tight_frame(40, 5, rng);
  BssConfig cfg;
  cfg.b = 2.0;
  cfg.seed = 1;
  const BssResult a = bss_subsample(y, FrameBounds{1.0, 1.0}, cfg);
  cfg.seed = 2;
  const BssResult b = bss_subsample(y, FrameBounds{1.0, 1.0}, cfg);
  CHECK(a.subframe.indices != b.subframe.indices);
}

TEST_CASE("invalid configurations are rejected before iterating") {
  const CMatrix y = doubled_identity_frame(3);
  BssConfig cfg;
  cfg.b = 0.9;  // below kappa^2 = 1
  CHECK_THROWS_AS(bss_subsample(y, FrameBounds{1.0, 1.0}, cfg), Error);

  BssConfig negative_delta;
  negative_delta.b = 4.0;
  negative_delta.delta = -0.5;
  CHECK_THROWS_AS(bss_subsample(y, FrameBounds{1.0, 1.0}, negative_delta), Error);

  BssConfig ok;
  ok.b = 4.0;
  CHECK_THROWS_AS(bss_subsample(y, FrameBounds{0.0, 1.0}, ok), Error);
}

TEST_CASE("zero rows are never selected") {
  const Index m = 3;
  CMatrix y(7, m);
  y.setZero();
  y.topRows(3) = CMatrix::Identity(m, m);
  y.bottomRows(3) = CMatrix::Identity(m, m);
  // row 3 stays zero
  BssConfig cfg;
  cfg.b = 4.1;
  cfg.seed = 8;
  const BssResult res = bss_subsample(y, frame_bounds(y), cfg);
  for (Index i : res.subframe.indices) CHECK(i != 3);
}

TEST_CASE("candidate mask restricts the scan") {
  const Index m = 3;
  CMatrix y(9, m);
  y.topRows(3) = CMatrix::Identity(m, m);
  y.middleRows(3, 3) = CMatrix::Identity(m, m);
  y.bottomRows(3) = CMatrix::Identity(m, m);
  y /= std::sqrt(3.0);
  BssConfig cfg;
  cfg.b = 4.0;
  cfg.seed = 4;
  cfg.candidate_mask.assign(9, 1);
  cfg.candidate_mask[0] = 0;
  cfg.candidate_mask[1] = 0;
  const BssResult res = bss_subsample(y, FrameBounds{1.0, 1.0}, cfg);
  for (Index i : res.subframe.indices) {
    CHECK(i != 0);
    CHECK(i != 1);
  }
  CHECK(res.bounds_out.lower >= 1.0 - 1e-8);
}

#ifndef FRAMESUB_STRATEGIES_HPP
#define FRAMESUB_STRATEGIES_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "framesub/bss.hpp"
#include "framesub/frame.hpp"
#include "framesub/precondition.hpp"

namespace framesub {

struct RandomDrawConfig {
  double p = 0.1;  // failure probability
  double t = 0.5;  // deviation
  double c = 0.5;  // mixing weight (unweighted variant only)
  std::uint64_t seed = 0;
  std::optional<Index> draw_count;  // overrides the default count formula
};

struct SubsampleOptions {
  std::uint64_t seed = 0;
  Traversal traversal = Traversal::seeded_permutation;
  bool fixed_shifts = false;
  bool record_trace = false;
  Index selection_lookahead = 4;  // see BssConfig
};

// Norm sampling: draws ceil(3B/(A t^2) m log(2m/p)) indices i.i.d. with
// probability |y^i|^2 / |Y|_F^2 and weight 1/(n rho_i) per draw, aggregated
// over duplicates. With probability >= 1-p the weighted bounds lie in
// [(1-t)A, (1+t)B].
WeightedSubframe random_weighted_subsample(const Eigen::Ref<const CMatrix>& rows,
                                           FrameBounds bounds, const RandomDrawConfig& cfg);

// Mixed-density unweighted draw: rho_i = (1-c)/M + c |ytilde^i|^2 / m with
// Ytilde the column-orthonormalized frame. Returns the draw multiset.
std::vector<Index> random_unweighted_subsample(const Eigen::Ref<const CMatrix>& rows,
                                               const RandomDrawConfig& cfg);

// Density of random_unweighted_subsample, exposed for tests and reports.
RVector mixed_sampling_density(const Eigen::Ref<const CMatrix>& rows, double c,
                               std::uint64_t seed = 0);

// Algorithm "BSS-perp": column-orthonormalize, run BSS on the tight rows with
// bounds (1, 1), and attach the weights to the original rows. Works for any
// b > 1 and any input with M >= m, frame or not; bounds_out certify
// [A, B (sqrt(b)+1)^2/(sqrt(b)-1)^2 (1+Delta)] when the input is a frame.
BssResult bss_perp(const Eigen::Ref<const CMatrix>& rows, double b, double delta,
                   const SubsampleOptions& opts = {});

// Constant (B/beta) (sqrt(b)+1)^2 / (sqrt(b)-1)^2 bounding
// (1/M) sum_all <= const (1/m) sum_J for norm-bounded Bessel systems.
double unweighted_lower_certificate(double beta, double upper_bound, double b);

struct PlainBssPlan {
  double b_prime;
  double b;            // (2 b' + 1) / 3
  double alpha;        // largest alpha with ceil(alpha m)/m <= alpha'
  double alpha_prime;  // (b' - 1) / (2 b' + 1)
  Index block_count;   // ceil(alpha m)
  Index m_prime_bound; // ceil((1 + alpha) m)
  Index budget;        // ceil(b' m)
};

PlainBssPlan plan_plain_bss(Index m, double b_prime);

struct PlainBssResult {
  std::vector<Index> indices;  // distinct, restricted to the original rows
  PlainBssPlan plan;
  Index padded_count = 0;      // rows after zero padding
  Index extended_dimension = 0;  // columns of the tight system
  Index padding_selected = 0;  // block-only padding rows consumed by BSS
  double certified_constant = 0.0;  // 432 b'^3/(b'-1)^3 (1+Delta)
  BssResult core;              // BSS run on the extended tight rows
};

// Algorithm "PlainBSS": zero-pad for divisibility, extend with block columns,
// BSS-subsample the tight rows, return the selected original indices.
// Selected padding rows carry zero original vectors and are dropped from J;
// the budget and the certificate are unaffected.
PlainBssResult plain_bss(const Eigen::Ref<const CMatrix>& rows, double b_prime, double delta,
                         const SubsampleOptions& opts = {});

struct TwoStepResult {
  std::vector<Index> indices;  // distinct original indices, |.| <= ceil(b' m)
  std::vector<Index> draws;    // stage-1 draw multiset (original indices)
  Index draw_count;            // n
  double lower_constant;       // (1-t)(b'-1)^3 / (432 b'^3)
  double upper_constant;       // (1+t) ceil(3 log(2m/p) / t^2)
  PlainBssResult plain;        // stage-2 run on the normalized drawn rows
};

// Two-step unit-norm extraction for tight frames: norm-sample
// ceil(3/t^2 m log(2m/p)) rows, then PlainBSS the normalized draws. The
// unit-norm system (y^i/|y^i|)_{i in J'} has two-sided bounds
// [lower_constant, upper_constant] with probability >= 1-p.
TwoStepResult two_step_unitnorm(const Eigen::Ref<const CMatrix>& rows, double b_prime, double p,
                                double t, const SubsampleOptions& opts = {});

}  // namespace framesub

#endif  // FRAMESUB_STRATEGIES_HPP

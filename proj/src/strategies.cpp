#include "framesub/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "framesub/rng.hpp"

namespace framesub {

namespace {

void validate_draw_config(const RandomDrawConfig& cfg) {
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) throw_invalid_config("p must lie in (0,1)");
  if (!(cfg.t > 0.0 && cfg.t < 1.0)) throw_invalid_config("t must lie in (0,1)");
  if (!(cfg.c > 0.0 && cfg.c < 1.0)) throw_invalid_config("c must lie in (0,1)");
}

}  // namespace

WeightedSubframe random_weighted_subsample(const Eigen::Ref<const CMatrix>& rows,
                                           FrameBounds bounds, const RandomDrawConfig& cfg) {
  validate_frame(rows);
  validate_draw_config(cfg);
  if (!(bounds.lower > 0.0)) throw_invalid_input("random weighted subsampling requires A > 0");
  const Index m = rows.cols();

  RVector density = rows.rowwise().squaredNorm();
  const double total = density.sum();
  density /= total;  // rho_i = |y^i|^2 / |Y|_F^2; zero rows are never drawn

  const Index n = cfg.draw_count.value_or(ceil_count(
      3.0 * bounds.upper / (bounds.lower * cfg.t * cfg.t) * static_cast<double>(m) *
      std::log(2.0 * static_cast<double>(m) / cfg.p)));
  if (n < 1) throw_invalid_config("draw count must be positive");

  Rng rng(cfg.seed);
  DiscreteSampler sampler(density);
  std::map<Index, Index> counts;
  for (Index k = 0; k < n; ++k) ++counts[sampler.sample(rng)];

  WeightedSubframe sub;
  sub.parent_count = rows.rows();
  sub.indices.reserve(counts.size());
  sub.weights.resize(static_cast<Index>(counts.size()));
  Index j = 0;
  for (const auto& [index, count] : counts) {
    sub.indices.push_back(index);
    sub.weights[j++] =
        static_cast<double>(count) / (static_cast<double>(n) * density[index]);
  }
  return sub;
}

RVector mixed_sampling_density(const Eigen::Ref<const CMatrix>& rows, double c,
                               std::uint64_t seed) {
  const Index count = rows.rows();
  const Index m = rows.cols();
  OrthonormalizeOptions opts;
  opts.seed = seed;
  const PreconditionedFrame pre = orthonormalize_columns(rows, opts);
  RVector density = pre.tight_rows.rowwise().squaredNorm();
  density = (1.0 - c) / static_cast<double>(count) +
            (c / static_cast<double>(m)) * density.array();
  return density;
}

std::vector<Index> random_unweighted_subsample(const Eigen::Ref<const CMatrix>& rows,
                                               const RandomDrawConfig& cfg) {
  validate_frame(rows);
  validate_draw_config(cfg);
  if (rows.rows() < rows.cols()) throw_invalid_input("unweighted subsampling requires M >= m");
  const Index m = rows.cols();

  Rng rng(cfg.seed);
  const RVector density = mixed_sampling_density(rows, cfg.c, rng.fork(1).seed());

  const Index n = cfg.draw_count.value_or(
      ceil_count(3.0 / (cfg.c * cfg.t * cfg.t) * static_cast<double>(m) *
                 std::log(static_cast<double>(m) / cfg.p)));
  if (n < 1) throw_invalid_config("draw count must be positive");

  DiscreteSampler sampler(density);
  std::vector<Index> draws;
  draws.reserve(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) draws.push_back(sampler.sample(rng));
  return draws;
}

BssResult bss_perp(const Eigen::Ref<const CMatrix>& rows, double b, double delta,
                   const SubsampleOptions& opts) {
  validate_frame(rows);
  if (rows.rows() < rows.cols()) throw_invalid_input("BSS-perp requires M >= m");
  if (!(b > 1.0)) throw_invalid_config("BSS-perp requires b > 1");

  OrthonormalizeOptions ortho;
  ortho.seed = Rng(opts.seed).fork(0x0517).seed();
  const PreconditionedFrame pre = orthonormalize_columns(rows, ortho);

  BssConfig cfg;
  cfg.b = b;
  cfg.delta = delta;
  cfg.traversal = opts.traversal;
  cfg.seed = opts.seed;
  cfg.fixed_shifts = opts.fixed_shifts;
  cfg.record_trace = opts.record_trace;
  cfg.selection_lookahead = opts.selection_lookahead;

  BssResult result = bss_subsample(pre.tight_rows, FrameBounds{1.0, 1.0}, cfg);
  // Weights transfer to the original rows; certify the bounds there.
  result.bounds_in = frame_bounds(rows);
  result.bounds_out = weighted_frame_bounds(rows, result.subframe);
  return result;
}

double unweighted_lower_certificate(double beta, double upper_bound, double b) {
  if (!(beta > 0.0)) throw_invalid_input("unweighted_lower_certificate requires beta > 0");
  if (!(upper_bound > 0.0)) throw_invalid_input("unweighted_lower_certificate requires B > 0");
  if (!(b > 1.0)) throw_invalid_input("unweighted_lower_certificate requires b > 1");
  const double s = std::sqrt(b);
  return upper_bound / beta * (s + 1.0) * (s + 1.0) / ((s - 1.0) * (s - 1.0));
}

PlainBssPlan plan_plain_bss(Index m, double b_prime) {
  if (m < 10) throw_invalid_config("PlainBSS requires m >= 10");
  if (!(b_prime > 1.0)) throw_invalid_config("PlainBSS requires b' > 1");
  PlainBssPlan plan;
  plan.b_prime = b_prime;
  plan.b = (2.0 * b_prime + 1.0) / 3.0;
  plan.alpha_prime = (b_prime - 1.0) / (2.0 * b_prime + 1.0);
  const double scaled = plan.alpha_prime * static_cast<double>(m);
  // Largest block count with ceil(alpha m)/m <= alpha'.
  Index blocks = static_cast<Index>(std::floor(scaled + 1e-9));
  if (blocks < 1)
    throw_invalid_config("PlainBSS needs m (b'-1) >= 2 b'+1 so at least one block column fits");
  plan.block_count = blocks;
  plan.alpha = static_cast<double>(blocks) / static_cast<double>(m);
  plan.m_prime_bound = m + blocks;
  plan.budget = ceil_count(b_prime * static_cast<double>(m));
  if (ceil_count(plan.b * static_cast<double>(m + blocks)) > plan.budget)
    throw Error(ErrorCode::internal_invariant, "PlainBSS plan exceeded its budget");
  return plan;
}

PlainBssResult plain_bss(const Eigen::Ref<const CMatrix>& rows, double b_prime, double delta,
                         const SubsampleOptions& opts) {
  validate_frame(rows);
  const Index count = rows.rows();
  const Index m = rows.cols();
  if (count < m + 10) throw_invalid_input("PlainBSS requires M >= m + 10");
  PlainBssPlan plan = plan_plain_bss(m, b_prime);
  if (plan.budget > count) throw_invalid_config("PlainBSS requires ceil(b' m) <= M");

  const Index padded = padded_count(count, plan.block_count);
  CMatrix work = zero_pad(rows, padded);

  OrthonormalizeOptions ortho;
  ortho.seed = Rng(opts.seed).fork(0x0406).seed();
  const PreconditionedFrame pre = extend_with_blocks(work, plan.alpha, ortho);

  BssConfig cfg;
  cfg.b = plan.b;
  cfg.delta = delta;
  cfg.traversal = opts.traversal;
  cfg.seed = opts.seed;
  cfg.fixed_shifts = opts.fixed_shifts;
  cfg.record_trace = opts.record_trace;
  cfg.selection_lookahead = opts.selection_lookahead;

  PlainBssResult result;
  // BSS runs over every extended row. The pure block rows belonging to the
  // padding range are legitimate candidates of the tight system (late in a
  // run they are often the only rows that can lift the lower barrier); their
  // weights attach to zero original vectors, so they are dropped from J.
  result.core = bss_subsample(pre.tight_rows, FrameBounds{1.0, 1.0}, cfg);
  result.plan = plan;
  result.padded_count = padded;
  result.extended_dimension = pre.dimension();
  result.certified_constant =
      432.0 * std::pow(b_prime, 3) / std::pow(b_prime - 1.0, 3) * (1.0 + delta);

  for (std::size_t j = 0; j < result.core.subframe.indices.size(); ++j) {
    const Index i = result.core.subframe.indices[j];
    if (i < count)
      result.indices.push_back(i);
    else
      ++result.padding_selected;
  }
  return result;
}

TwoStepResult two_step_unitnorm(const Eigen::Ref<const CMatrix>& rows, double b_prime, double p,
                                double t, const SubsampleOptions& opts) {
  validate_frame(rows);
  const Index count = rows.rows();
  const Index m = rows.cols();
  if (!(p > 0.0 && p < 1.0)) throw_invalid_config("p must lie in (0,1)");
  if (!(t > 0.0 && t < 1.0)) throw_invalid_config("t must lie in (0,1)");
  if (ceil_count(b_prime * static_cast<double>(m)) > count)
    throw_invalid_input("two-step subsampling requires M >= ceil(b' m)");
  const FrameBounds bounds = frame_bounds(rows);
  if (!(bounds.lower > 0.0) || bounds.upper - bounds.lower > 1e-6 * bounds.upper)
    throw_invalid_input("two-step subsampling requires a tight frame");

  TwoStepResult result;
  const Index n = ceil_count(3.0 / (t * t) * static_cast<double>(m) *
                             std::log(2.0 * static_cast<double>(m) / p));
  result.draw_count = n;

  RVector density = rows.rowwise().squaredNorm();
  density /= density.sum();
  Rng rng(opts.seed);
  DiscreteSampler sampler(density);
  result.draws.reserve(static_cast<std::size_t>(n));
  CMatrix drawn(n, m);
  for (Index k = 0; k < n; ++k) {
    const Index i = sampler.sample(rng);
    result.draws.push_back(i);
    drawn.row(k) = rows.row(i) / rows.row(i).norm();
  }

  SubsampleOptions stage2 = opts;
  stage2.seed = rng.fork(0x2717).seed();
  result.plain = plain_bss(drawn, b_prime, 0.0, stage2);

  std::set<Index> distinct;
  for (Index k : result.plain.indices) distinct.insert(result.draws[static_cast<std::size_t>(k)]);
  result.indices.assign(distinct.begin(), distinct.end());

  result.lower_constant =
      (1.0 - t) * std::pow(b_prime - 1.0, 3) / (432.0 * std::pow(b_prime, 3));
  result.upper_constant =
      (1.0 + t) * static_cast<double>(ceil_count(
                      3.0 * std::log(2.0 * static_cast<double>(m) / p) / (t * t)));
  return result;
}

}  // namespace framesub

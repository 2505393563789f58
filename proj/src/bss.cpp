#include "framesub/bss.hpp"

#include <cmath>
#include <map>
#include <numeric>

namespace framesub {

double kappa(double lower, double upper) {
  if (!(lower > 0.0) || !(upper >= lower) || !std::isfinite(upper))
    throw_invalid_input("kappa requires 0 < A <= B < inf");
  const double h = upper / (2.0 * lower) + 0.5;
  return h + std::sqrt(std::max(h * h - 1.0, 0.0));
}

double gamma_factor(double b, double kappa) {
  if (!(kappa >= 1.0)) throw_invalid_input("gamma requires kappa >= 1");
  if (!(b > kappa * kappa)) throw_invalid_config("gamma requires b > kappa^2");
  const double s = std::sqrt(b);
  return (s + 1.0) * (s + 1.0) / ((s - 1.0) * (s - kappa));
}

Index ceil_count(double x) {
  if (!std::isfinite(x) || x < 0.0) throw_invalid_input("count must be finite and nonnegative");
  const double snapped = std::round(x);
  if (std::abs(x - snapped) <= 1e-9 * std::max(1.0, std::abs(x)))
    return static_cast<Index>(snapped);
  return static_cast<Index>(std::ceil(x));
}

BssCore::BssCore(Index dimension, FrameBounds bounds, double b, double delta, bool fixed_shifts,
                 double candidate_count)
    : dimension_(dimension),
      bounds_(bounds),
      b_(b),
      delta_(delta),
      fixed_shifts_(fixed_shifts),
      accumulator_(HermitianAccumulator::Zero(dimension)) {
  if (dimension < 1) throw_invalid_input("BSS requires m >= 1");
  if (!(bounds.lower > 0.0)) throw_invalid_input("BSS requires a frame certificate with A > 0");
  if (!(delta >= 0.0)) throw_invalid_config("stability factor must be >= 0");
  if (!(candidate_count >= 1.0)) throw_invalid_input("BSS requires at least one candidate");
  kappa_ = kappa(bounds.lower, bounds.upper);
  if (!(b > kappa_ * kappa_))
    throw_invalid_config("oversampling factor must exceed kappa^2 = " +
                         std::to_string(kappa_ * kappa_));
  gamma_ = gamma_factor(b, kappa_);
  total_iterations_ = ceil_count(b * static_cast<double>(dimension));

  const double m = static_cast<double>(dimension);
  const double s = std::sqrt(b);
  const double ratio = bounds.upper / bounds.lower;
  lower_barrier_ = -m * s * kappa_ / (1.0 + delta);
  upper_barrier_ = m * (b + s) / (s - 1.0) * ratio;
  initial_delta_lower_ = 1.0 / (1.0 + delta);
  initial_delta_upper_ = (s + 1.0) / (s - 1.0) * ratio;
  initial_eps_lower_ = -m / lower_barrier_;
  initial_eps_upper_ = m / upper_barrier_;
  threshold_ = delta / (2.0 * candidate_count) * (1.0 - 1.0 / s);
}

void BssCore::check_containment() const {
  const double slack_low = 1e-10 * std::max(1.0, std::abs(lower_barrier_));
  const double slack_up = 1e-10 * std::max(1.0, std::abs(upper_barrier_));
  if (accumulator_.min_eigenvalue() <= lower_barrier_ - slack_low ||
      accumulator_.max_eigenvalue() >= upper_barrier_ + slack_up) {
    Error err(ErrorCode::internal_invariant, "spectrum escaped the barrier window");
    err.iteration = iteration_;
    throw err;
  }
}

void BssCore::begin_iteration() {
  if (finished()) throw Error(ErrorCode::internal_invariant, "begin_iteration after completion");
  check_containment();

  eps_lower_ = lower_potential(accumulator_, lower_barrier_);
  eps_upper_ = upper_potential(accumulator_, upper_barrier_);

  if (fixed_shifts_) {
    delta_lower_ = initial_delta_lower_;
    delta_upper_ = initial_delta_upper_;
  } else {
    delta_lower_ = 1.0 / (1.0 / initial_delta_lower_ - kappa_ * initial_eps_lower_ +
                          kappa_ * eps_lower_);
    delta_upper_ = 1.0 / (1.0 / initial_delta_upper_ + initial_eps_upper_ - eps_upper_);
  }
  if (!(delta_lower_ > 0.0) || !(delta_upper_ > 0.0))
    throw Error(ErrorCode::internal_invariant, "barrier shifts lost positivity");

  lower_barrier_ += delta_lower_;
  upper_barrier_ += delta_upper_;

  const Eigen::ArrayXd lambda = accumulator_.eigenvalues().array();
  gap_lower_ = lambda - lower_barrier_;
  gap_upper_ = upper_barrier_ - lambda;
  if ((gap_lower_ <= 0.0).any() || (gap_upper_ <= 0.0).any())
    throw Error(ErrorCode::internal_invariant, "shifted barrier crossed the spectrum");

  // Potential differences in product form; avoids cancellation of two
  // nearly equal sums.
  lower_denominator_ = (delta_lower_ / (gap_lower_ * (gap_lower_ + delta_lower_))).sum();
  upper_denominator_ = (delta_upper_ / (gap_upper_ * (gap_upper_ + delta_upper_))).sum();
  if (!(lower_denominator_ > 0.0) || !(upper_denominator_ > 0.0))
    throw Error(ErrorCode::internal_invariant, "potential difference lost positivity");

  scan_ready_ = true;
}

GatePair BssCore::gates(const CVector& candidate) const {
  if (!scan_ready_) throw Error(ErrorCode::internal_invariant, "gates before begin_iteration");
  const RVector w = (accumulator_.eigenvectors().adjoint() * candidate).cwiseAbs2();
  const Eigen::ArrayXd wa = w.array();
  const double lower = (wa / gap_lower_.square()).sum() / lower_denominator_ -
                       (wa / gap_lower_).sum();
  const double upper = (wa / gap_upper_.square()).sum() / upper_denominator_ +
                       (wa / gap_upper_).sum();
  return GatePair{lower, upper};
}

void BssCore::accept(const CVector& candidate, double weight) {
  if (!scan_ready_) throw Error(ErrorCode::internal_invariant, "accept before begin_iteration");
  if (!(weight > 0.0) || !std::isfinite(weight))
    throw Error(ErrorCode::internal_invariant, "selected weight must be positive and finite");
  accumulator_ = rank1_update(accumulator_, candidate, weight);
  ++iteration_;
  scan_ready_ = false;
}

double BssCore::rescale_factor() const {
  if (!finished()) throw Error(ErrorCode::internal_invariant, "rescale before completion");
  return 0.5 * (bounds_.lower / lower_barrier_ +
                bounds_.upper * gamma_ * (1.0 + delta_) / upper_barrier_);
}

BssResult bss_subsample(const Eigen::Ref<const CMatrix>& rows, FrameBounds bounds,
                        const BssConfig& cfg) {
  validate_frame(rows);
  const Index count = rows.rows();
  const Index m = rows.cols();
  if (!cfg.candidate_mask.empty() && static_cast<Index>(cfg.candidate_mask.size()) != count)
    throw_invalid_input("candidate mask length does not match the frame");

  // Rows of zero norm (and masked rows) never enter the scan: a zero row has
  // L = U = 0 and would pass the Delta = 0 threshold with an infinite weight.
  std::vector<Index> eligible;
  eligible.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    if (!cfg.candidate_mask.empty() && !cfg.candidate_mask[static_cast<std::size_t>(i)]) continue;
    if (rows.row(i).squaredNorm() == 0.0) continue;
    eligible.push_back(i);
  }
  if (eligible.empty()) throw_invalid_input("no eligible candidate rows");

  BssCore core(m, bounds, cfg.b, cfg.delta, cfg.fixed_shifts, static_cast<double>(count));
  Rng rng(cfg.seed);

  std::map<Index, double> raw_weights;
  std::vector<BssIterationRecord> trace;
  std::vector<Index> order(eligible);
  std::int64_t total_scans = 0;

  while (!core.finished()) {
    core.begin_iteration();

    if (cfg.traversal == Traversal::seeded_permutation) {
      const auto perm = random_permutation(static_cast<Index>(eligible.size()), rng);
      for (std::size_t j = 0; j < eligible.size(); ++j)
        order[j] = eligible[static_cast<std::size_t>(perm[j])];
    }

    Index selected = -1;
    GatePair selected_gates{0.0, 0.0};
    Index scans = 0;
    Index passing = 0;
    double best_margin = 0.0;
    const Index lookahead = std::max<Index>(cfg.selection_lookahead, 1);
    for (Index candidate : order) {
      ++scans;
      const GatePair g = core.gates(rows.row(candidate).adjoint());
      if (core.passes(g)) {
        const double margin = g.lower - g.upper;
        if (passing == 0 || margin > best_margin) {
          selected = candidate;
          selected_gates = g;
          best_margin = margin;
        }
        if (++passing >= lookahead) break;
      }
    }
    total_scans += scans;

    if (selected < 0) {
      Error err(ErrorCode::selection_failure,
                cfg.delta == 0.0
                    ? "no candidate passed the selection condition; retry with delta = 1e-8"
                    : "no candidate passed the selection condition");
      err.iteration = core.iteration() + 1;
      throw err;
    }

    const double t = BssCore::weight_from_gates(selected_gates);
    const CVector y = rows.row(selected).adjoint();

    if (cfg.record_trace) {
      const BarrierPair bar = core.barriers();
      trace.push_back(BssIterationRecord{
          core.iteration() + 1, bar.lower - core.delta_lower(), bar.upper - core.delta_upper(),
          core.eps_lower(), core.eps_upper(), core.delta_lower(), core.delta_upper(),
          core.lambda_min(), core.lambda_max(), selected, selected_gates.lower,
          selected_gates.upper, t, scans});
    }
    core.accept(y, t);
    raw_weights[selected] += t;
  }

  BssResult result;
  result.kappa = core.kappa_value();
  result.gamma = core.gamma_value();
  result.iterations = core.total_iterations();
  const BarrierPair final_bar = core.barriers();
  result.final_lower_barrier = final_bar.lower;
  result.final_upper_barrier = final_bar.upper;
  result.avg_inner_scans =
      static_cast<double>(total_scans) / static_cast<double>(core.total_iterations());
  result.bounds_in = bounds;

  const double rescale = core.rescale_factor();
  WeightedSubframe sub;
  sub.parent_count = count;
  sub.indices.reserve(raw_weights.size());
  sub.weights.resize(static_cast<Index>(raw_weights.size()));
  Index j = 0;
  for (const auto& [index, raw] : raw_weights) {
    sub.indices.push_back(index);
    sub.weights[j++] = rescale * raw;
  }
  result.subframe = std::move(sub);
  result.bounds_out = weighted_frame_bounds(rows, result.subframe);
  result.trace = std::move(trace);
  return result;
}

}  // namespace framesub

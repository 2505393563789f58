#include "framesub/fourier.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "framesub/strategies.hpp"

namespace framesub {

namespace {

void append_cross(Index d, Index coordinate, Index budget, Eigen::VectorXi& work,
                  std::vector<Eigen::VectorXi>& out) {
  if (coordinate == d) {
    out.push_back(work);
    return;
  }
  const int limit = static_cast<int>(budget);
  for (int k = -limit; k <= limit; ++k) {
    work[coordinate] = k;
    const Index factor = std::max<Index>(1, std::abs(k));
    append_cross(d, coordinate + 1, budget / factor, work, out);
  }
}

Complex unit_exp(double phase) {
  return Complex(std::cos(phase), std::sin(phase));
}

CVector raw_exponential_row(const std::vector<Eigen::VectorXi>& frequencies, const RVector& x) {
  CVector row(static_cast<Index>(frequencies.size()));
  for (std::size_t k = 0; k < frequencies.size(); ++k) {
    const double phase = 2.0 * std::numbers::pi * frequencies[k].cast<double>().dot(x);
    row[static_cast<Index>(k)] = unit_exp(phase);
  }
  return row;
}

std::uint64_t per_b_seed(std::uint64_t seed, double b, std::uint64_t salt) {
  return Rng(seed).fork(std::bit_cast<std::uint64_t>(b) ^ salt).seed();
}

// Bounds of (1/m) sum over the selected rows of the unnormalized exponential
// frame; `scale` converts the stored rows back to modulus-one entries.
FrameBounds mz_normalized_bounds(const CMatrix& rows, const std::vector<Index>& selection,
                                 double scale) {
  const Index m = rows.cols();
  CMatrix gram = CMatrix::Zero(m, m);
  for (Index i : selection) {
    const CVector y = rows.row(i).adjoint() * scale;
    gram.selfadjointView<Eigen::Lower>().rankUpdate(y, 1.0 / static_cast<double>(m));
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  return gram_bounds(gram);
}

double theoretical_lower_bound(double b, double upper_bound) {
  const double s = std::sqrt(b);
  return (s - 1.0) * (s - 1.0) / ((s + 1.0) * (s + 1.0)) / upper_bound;
}

ExperimentReport dense_experiment_run(int id, const CMatrix& frame, FrameBounds before, double b,
                                      std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.experiment_id = id;
  report.M = frame.rows();
  report.m = frame.cols();
  report.b = b;
  report.seed = seed;
  report.bounds_before = before;
  report.theoretical_lower = theoretical_lower_bound(b, before.upper);

  SubsampleOptions opts;
  opts.seed = per_b_seed(seed, b, 0xb55);
  const BssResult res = bss_perp(frame, b, 0.0, opts);
  report.n = res.subframe.size();
  report.inner_scan_avg = res.avg_inner_scans;

  const double scale = std::sqrt(static_cast<double>(frame.rows()));
  report.bounds_after_bss = mz_normalized_bounds(frame, res.subframe.indices, scale);

  Rng baseline_rng(per_b_seed(seed, b, 0x6a5e11e));
  std::vector<Index> random_pick;
  random_pick.reserve(static_cast<std::size_t>(report.n));
  for (Index k = 0; k < report.n; ++k)
    random_pick.push_back(static_cast<Index>(baseline_rng.uniform_index(
        static_cast<std::uint64_t>(frame.rows()))));
  report.bounds_after_random = mz_normalized_bounds(frame, random_pick, scale);

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ExperimentReport streaming_grid_run(const FrequencyIndexSet& freq, Index grid_per_axis, double b,
                                    std::uint64_t seed, const ExperimentOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const Index m = freq.size();
  const Index d = freq.dimension;
  const double node_total =
      std::pow(static_cast<double>(grid_per_axis), static_cast<double>(d));

  ExperimentReport report;
  report.experiment_id = 3;
  report.m = m;
  report.M = 0;  // exceeds any integer type; the node count lives in node_total
  report.b = b;
  report.seed = seed;
  report.bounds_before = FrameBounds{1.0, 1.0};  // exact lattice quadrature
  report.theoretical_lower = theoretical_lower_bound(b, 1.0);

  // Raw exponential rows with the certificate (|X|, |X|); candidate grid
  // points are materialized per scan step, never stored.
  BssCore core(m, FrameBounds{node_total, node_total}, b, 0.0, false, node_total);
  Rng rng(per_b_seed(seed, b, 0x57e4));

  std::set<std::vector<int>> selected;
  RVector x(d);
  std::vector<int> key(static_cast<std::size_t>(d));
  std::int64_t total_scans = 0;
  const Index lookahead = 4;
  while (!core.finished()) {
    core.begin_iteration();
    Index passing = 0;
    double best_margin = 0.0;
    CVector best_row;
    GatePair best_gates{0.0, 0.0};
    std::vector<int> best_key;
    for (Index scan = 0; scan < opts.stream_scan_cap && passing < lookahead; ++scan) {
      ++total_scans;
      for (Index j = 0; j < d; ++j) {
        const auto digit = static_cast<int>(rng.uniform_index(
            static_cast<std::uint64_t>(grid_per_axis)));
        key[static_cast<std::size_t>(j)] = digit;
        x[j] = static_cast<double>(digit) / static_cast<double>(grid_per_axis);
      }
      const CVector y = raw_exponential_row(freq.indices, x);
      const GatePair g = core.gates(y);
      if (core.passes(g)) {
        const double margin = g.lower - g.upper;
        if (passing == 0 || margin > best_margin) {
          best_margin = margin;
          best_row = y;
          best_gates = g;
          best_key = key;
        }
        ++passing;
      }
    }
    if (passing == 0) {
      Error err(ErrorCode::selection_failure, "streaming scan cap reached without a candidate");
      err.iteration = core.iteration() + 1;
      throw err;
    }
    core.accept(best_row, BssCore::weight_from_gates(best_gates));
    selected.insert(best_key);
  }
  report.inner_scan_avg =
      static_cast<double>(total_scans) / static_cast<double>(core.total_iterations());
  report.n = static_cast<Index>(selected.size());

  const auto gram_of = [&](const std::vector<std::vector<int>>& keys) {
    CMatrix gram = CMatrix::Zero(m, m);
    RVector node(d);
    for (const auto& k : keys) {
      for (Index j = 0; j < d; ++j)
        node[j] = static_cast<double>(k[static_cast<std::size_t>(j)]) /
                  static_cast<double>(grid_per_axis);
      gram.selfadjointView<Eigen::Lower>().rankUpdate(raw_exponential_row(freq.indices, node),
                                                      1.0 / static_cast<double>(m));
    }
    gram = gram.selfadjointView<Eigen::Lower>();
    return gram;
  };

  report.bounds_after_bss =
      gram_bounds(gram_of(std::vector<std::vector<int>>(selected.begin(), selected.end())));

  Rng baseline_rng(per_b_seed(seed, b, 0x6a5e11e));
  std::vector<std::vector<int>> random_keys;
  for (Index i = 0; i < report.n; ++i) {
    std::vector<int> k(static_cast<std::size_t>(d));
    for (auto& digit : k)
      digit = static_cast<int>(baseline_rng.uniform_index(
          static_cast<std::uint64_t>(grid_per_axis)));
    random_keys.push_back(std::move(k));
  }
  report.bounds_after_random = gram_bounds(gram_of(random_keys));

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace

FrequencyIndexSet hyperbolic_cross(Index d, Index radius) {
  if (d < 1 || radius < 1) throw_invalid_input("hyperbolic cross needs d >= 1 and R >= 1");
  FrequencyIndexSet set;
  set.kind = FrequencyIndexSet::Kind::hyperbolic_cross;
  set.dimension = d;
  Eigen::VectorXi work(d);
  append_cross(d, 0, radius, work, set.indices);
  return set;
}

FrequencyIndexSet full_grid_frequencies(Index d, int k_min, int k_max) {
  if (d < 1 || k_max < k_min) throw_invalid_input("empty frequency grid");
  FrequencyIndexSet set;
  set.kind = FrequencyIndexSet::Kind::full_grid;
  set.dimension = d;
  const Index width = k_max - k_min + 1;
  double total = 1.0;
  for (Index j = 0; j < d; ++j) total *= static_cast<double>(width);
  if (total > 2e7) throw_invalid_input("frequency grid too large to enumerate");
  Eigen::VectorXi work = Eigen::VectorXi::Constant(d, k_min);
  for (;;) {
    set.indices.push_back(work);
    Index j = 0;
    for (; j < d; ++j) {
      if (++work[j] <= k_max) break;
      work[j] = k_min;
    }
    if (j == d) break;
  }
  return set;
}

FrequencyIndexSet random_frequencies(Index d, Index count, int k_min, int k_max,
                                     std::uint64_t seed) {
  if (d < 1 || count < 1 || k_max < k_min) throw_invalid_input("bad random frequency request");
  FrequencyIndexSet set;
  set.kind = FrequencyIndexSet::Kind::random;
  set.dimension = d;
  Rng rng(seed);
  std::set<std::vector<int>> seen;
  const auto width = static_cast<std::uint64_t>(k_max - k_min + 1);
  while (set.size() < count) {
    std::vector<int> k(static_cast<std::size_t>(d));
    for (auto& entry : k) entry = k_min + static_cast<int>(rng.uniform_index(width));
    if (!seen.insert(k).second) continue;
    Eigen::VectorXi v(d);
    for (Index j = 0; j < d; ++j) v[j] = k[static_cast<std::size_t>(j)];
    set.indices.push_back(std::move(v));
  }
  return set;
}

NodeSet equispaced_grid(Index d, Index per_axis) {
  if (d < 1 || per_axis < 1) throw_invalid_input("empty node grid");
  double total = 1.0;
  for (Index j = 0; j < d; ++j) total *= static_cast<double>(per_axis);
  if (total > 2e7) throw_invalid_input("node grid too large to enumerate");
  NodeSet nodes;
  std::vector<Index> digits(static_cast<std::size_t>(d), 0);
  const auto count = static_cast<Index>(total);
  nodes.nodes.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    RVector x(d);
    for (Index j = 0; j < d; ++j)
      x[j] = static_cast<double>(digits[static_cast<std::size_t>(j)]) /
             static_cast<double>(per_axis);
    nodes.nodes.push_back(std::move(x));
    for (Index j = 0; j < d; ++j) {
      if (++digits[static_cast<std::size_t>(j)] < per_axis) break;
      digits[static_cast<std::size_t>(j)] = 0;
    }
  }
  return nodes;
}

NodeSet random_nodes(Index d, Index count, std::uint64_t seed) {
  if (d < 1 || count < 1) throw_invalid_input("empty random node request");
  NodeSet nodes;
  Rng rng(seed);
  nodes.nodes.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    RVector x(d);
    for (Index j = 0; j < d; ++j) x[j] = rng.uniform();
    nodes.nodes.push_back(std::move(x));
  }
  return nodes;
}

NodeSet shift_nodes(const NodeSet& nodes, const RVector& offset) {
  NodeSet shifted = nodes;
  for (auto& x : shifted.nodes) x += offset;
  return shifted;
}

NodeSet concatenate_nodes(const NodeSet& a, const NodeSet& b) {
  NodeSet joined = a;
  joined.nodes.insert(joined.nodes.end(), b.nodes.begin(), b.nodes.end());
  if (a.weights.size() != 0 || b.weights.size() != 0)
    throw_invalid_input("concatenate_nodes does not merge weights");
  return joined;
}

CMatrix fourier_frame(const FrequencyIndexSet& frequencies, const NodeSet& nodes) {
  if (frequencies.size() < 1 || nodes.size() < 1) throw_invalid_input("empty Fourier frame");
  if (nodes.dimension() != frequencies.dimension)
    throw_invalid_input("node dimension does not match the frequency dimension");
  const Index count = nodes.size();
  const Index m = frequencies.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(count));
  CMatrix frame(count, m);
  for (Index i = 0; i < count; ++i)
    frame.row(i) =
        scale * raw_exponential_row(frequencies.indices, nodes.nodes[static_cast<std::size_t>(i)])
                    .transpose();
  return frame;
}

BasisSpec fourier_basis(const FrequencyIndexSet& frequencies) {
  if (frequencies.size() < 1) throw_invalid_input("empty Fourier basis");
  BasisSpec basis;
  basis.size = frequencies.size();
  basis.domain = Domain::unit_box(frequencies.dimension);
  auto indices = frequencies.indices;
  basis.evaluate = [indices](Index k, const RVector& x) {
    const double phase =
        2.0 * std::numbers::pi * indices[static_cast<std::size_t>(k)].cast<double>().dot(x);
    return unit_exp(phase);
  };
  return basis;
}

std::vector<ExperimentReport> run_experiment(int id, const std::vector<double>& b_values,
                                             std::uint64_t seed, const ExperimentOptions& opts) {
  if (b_values.empty()) throw_invalid_config("experiment needs at least one b value");
  std::vector<ExperimentReport> reports;

  if (id == 1 || id == 2) {
    FrequencyIndexSet freq;
    NodeSet nodes;
    if (id == 1) {
      freq = hyperbolic_cross(2, 12);
      nodes = equispaced_grid(2, 25);
    } else {
      freq = full_grid_frequencies(2, -6, 6);
      const NodeSet grid = equispaced_grid(2, 13);
      nodes = concatenate_nodes(grid, shift_nodes(grid, RVector::Constant(2, 0.01)));
    }
    const CMatrix frame = fourier_frame(freq, nodes);
    const FrameBounds before = frame_bounds(frame);
    for (double b : b_values) reports.push_back(dense_experiment_run(id, frame, before, b, seed));
    return reports;
  }

  if (id != 3) throw_invalid_config("experiment id must be 1, 2 or 3");

  const Index d = 25;
  const Index m = opts.frequency_count > 0 ? opts.frequency_count : 500;
  const FrequencyIndexSet freq =
      random_frequencies(d, m, -1000, 1000, Rng(seed).fork(0xf4e9).seed());

  if (opts.grid_variant) {
    if (!opts.enable_streaming)
      throw Error(ErrorCode::capability,
                  "the 2001^25 grid exceeds dense storage; enable streaming mode");
    for (double b : b_values) reports.push_back(streaming_grid_run(freq, 2001, b, seed, opts));
    return reports;
  }

  const Index node_count =
      opts.node_count > 0
          ? opts.node_count
          : ceil_count(6.0 * static_cast<double>(m) * std::log(static_cast<double>(m)));
  const NodeSet nodes = random_nodes(d, node_count, Rng(seed).fork(0x90de5).seed());
  const CMatrix frame = fourier_frame(freq, nodes);
  const FrameBounds before = frame_bounds(frame);
  for (double b : b_values) reports.push_back(dense_experiment_run(3, frame, before, b, seed));
  return reports;
}

}  // namespace framesub

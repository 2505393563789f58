#ifndef FRAMESUB_FOURIER_HPP
#define FRAMESUB_FOURIER_HPP

#include <cstdint>
#include <vector>

#include "framesub/frame.hpp"
#include "framesub/recovery.hpp"

namespace framesub {

struct FrequencyIndexSet {
  enum class Kind { hyperbolic_cross, full_grid, random };

  Kind kind = Kind::full_grid;
  Index dimension = 0;
  std::vector<Eigen::VectorXi> indices;  // distinct integer frequency vectors

  Index size() const { return static_cast<Index>(indices.size()); }
};

// All k in Z^d with prod_j max(1, |k_j|) <= radius.
FrequencyIndexSet hyperbolic_cross(Index d, Index radius);

// Full tensor grid [k_min, k_max]^d.
FrequencyIndexSet full_grid_frequencies(Index d, int k_min, int k_max);

// `count` distinct frequencies drawn uniformly from [k_min, k_max]^d.
FrequencyIndexSet random_frequencies(Index d, Index count, int k_min, int k_max,
                                     std::uint64_t seed);

// per_axis^d lattice nodes i/per_axis in [0,1)^d.
NodeSet equispaced_grid(Index d, Index per_axis);

NodeSet random_nodes(Index d, Index count, std::uint64_t seed);

NodeSet shift_nodes(const NodeSet& nodes, const RVector& offset);

NodeSet concatenate_nodes(const NodeSet& a, const NodeSet& b);

// M x m frame with entries exp(2 pi i <k, x^i>)/sqrt(M); equal-norm rows with
// |y^i|^2 = m/M, tight whenever the node lattice is exact for the frequencies.
CMatrix fourier_frame(const FrequencyIndexSet& frequencies, const NodeSet& nodes);

// The same exponentials as an orthonormal basis of L_2([0,1)^d) for recovery.
BasisSpec fourier_basis(const FrequencyIndexSet& frequencies);

struct ExperimentReport {
  int experiment_id = 0;
  Index m = 0;
  Index M = 0;
  Index n = 0;  // distinct selected rows
  double b = 0.0;
  FrameBounds bounds_before;
  // Bounds of (1/m) sum_{i in J} yhat^i (yhat^i)* with yhat the unnormalized
  // exponential rows; Lemma-4.2-certified: lower >= theoretical_lower.
  FrameBounds bounds_after_bss;
  FrameBounds bounds_after_random;  // uniform baseline at equal draw count
  double theoretical_lower = 0.0;   // (1/B)(sqrt(b)-1)^2/(sqrt(b)+1)^2
  double inner_scan_avg = 0.0;
  std::uint64_t seed = 0;
  double runtime_seconds = 0.0;  // informational; never serialized
};

struct ExperimentOptions {
  Index frequency_count = 0;   // experiment 3: m override (paper value 500)
  Index node_count = 0;        // experiment 3: M override (default ceil(6 m log m))
  bool grid_variant = false;   // experiment 3: implicit 2001^d grid instead of random nodes
  bool enable_streaming = true;
  Index stream_scan_cap = 200000;  // max candidate draws per iteration in streaming mode
};

// Reproduces the three Fourier experiments: 1) hyperbolic cross R=12 on a
// 25x25 grid, 2) duplicated shifted 13x13 grids with full-grid frequencies,
// 3) d=25 random frequencies with random nodes or the implicit full grid.
std::vector<ExperimentReport> run_experiment(int id, const std::vector<double>& b_values,
                                             std::uint64_t seed,
                                             const ExperimentOptions& opts = {});

}  // namespace framesub

#endif  // FRAMESUB_FOURIER_HPP

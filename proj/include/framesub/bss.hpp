#ifndef FRAMESUB_BSS_HPP
#define FRAMESUB_BSS_HPP

#include <cstdint>
#include <vector>

#include "framesub/frame.hpp"
#include "framesub/potentials.hpp"
#include "framesub/rng.hpp"

namespace framesub {

// kappa(A, B) = (B/2A + 1/2) + sqrt((B/2A + 1/2)^2 - 1); equals 1 iff A == B.
double kappa(double lower, double upper);

// gamma(b, kappa) = (sqrt(b)+1)^2 / ((sqrt(b)-1)(sqrt(b)-kappa)); needs b > kappa^2.
double gamma_factor(double b, double kappa);

// Rounds x up to the next integer, snapping values within 1e-9 of an integer
// first so that products like 1.2 * 20 do not spill over to 25.
Index ceil_count(double x);

enum class Traversal {
  seeded_permutation,  // fresh random permutation of the candidates each iteration
  sequential,
};

struct BssConfig {
  double b = 0.0;      // oversampling factor, must exceed kappa(A,B)^2
  double delta = 0.0;  // stability factor, >= 0
  Traversal traversal = Traversal::seeded_permutation;
  std::uint64_t seed = 0;
  bool fixed_shifts = false;  // keep the initial barrier shifts in every iteration
  bool record_trace = false;
  // The scan stops once this many threshold-passing candidates were seen and
  // takes the one with the largest gate margin L - U. Any passing candidate
  // keeps every certificate; 1 reproduces the verbatim stop-at-first rule,
  // larger values markedly improve the conditioning of the selected subframe
  // at nearly-critical oversampling while the scan cost stays O(lookahead /
  // pass-rate) per iteration.
  Index selection_lookahead = 4;
  // Optional per-row eligibility (size M); empty means every row is a candidate.
  std::vector<char> candidate_mask;
};

struct GatePair {
  double lower;  // L(y)
  double upper;  // U(y)
};

struct BssIterationRecord {
  Index iteration;        // k, 1-based
  double lower_barrier;   // l^{(k-1)}
  double upper_barrier;   // u^{(k-1)}
  double eps_lower;       // Phi_{l^{(k-1)}}(A^{(k-1)})
  double eps_upper;       // Phi^{u^{(k-1)}}(A^{(k-1)})
  double delta_lower;     // delta_L^{(k-1)}
  double delta_upper;     // delta_U^{(k-1)}
  double lambda_min;      // spectrum of A^{(k-1)}
  double lambda_max;
  Index selected;         // chosen candidate id (driver-specific meaning)
  double gate_lower;      // L at the selected candidate
  double gate_upper;      // U at the selected candidate
  double weight;          // t^{(k)}
  Index scans;            // candidates evaluated this iteration
};

struct BssResult {
  WeightedSubframe subframe;  // distinct selected indices with rescaled weights
  double kappa = 1.0;
  double gamma = 0.0;
  Index iterations = 0;
  double final_lower_barrier = 0.0;
  double final_upper_barrier = 0.0;
  double avg_inner_scans = 0.0;
  FrameBounds bounds_in;
  FrameBounds bounds_out;  // eigenvalue-certified bounds of the weighted subframe
  std::vector<BssIterationRecord> trace;
};

// Per-iteration state machine of the algorithm. Drivers supply candidates;
// the core owns barriers, shifts, potentials and the accumulator.
class BssCore {
 public:
  // `candidate_count` enters only through the selection threshold
  // (delta / (2 * candidate_count)) * (1 - 1/sqrt(b)); it may be far larger
  // than any materialized matrix (streaming candidates).
  BssCore(Index dimension, FrameBounds bounds, double b, double delta, bool fixed_shifts,
          double candidate_count);

  Index total_iterations() const { return total_iterations_; }
  Index iteration() const { return iteration_; }  // completed updates
  bool finished() const { return iteration_ >= total_iterations_; }

  // Computes potentials, variable shifts and the shifted barriers for the
  // next update. Must be called once before scanning candidates.
  void begin_iteration();

  GatePair gates(const CVector& candidate) const;

  bool passes(const GatePair& g) const { return g.lower - g.upper >= threshold_; }

  static double weight_from_gates(const GatePair& g) { return 2.0 / (g.lower + g.upper); }

  // Commits the rank-1 update with the chosen candidate and weight.
  void accept(const CVector& candidate, double weight);

  // (1/2)(A / l^{(n)} + B gamma (1+Delta) / u^{(n)}), valid once finished.
  double rescale_factor() const;

  double kappa_value() const { return kappa_; }
  double gamma_value() const { return gamma_; }
  double selection_threshold() const { return threshold_; }

  // State of the pending iteration (valid after begin_iteration):
  double eps_lower() const { return eps_lower_; }
  double eps_upper() const { return eps_upper_; }
  double delta_lower() const { return delta_lower_; }
  double delta_upper() const { return delta_upper_; }
  BarrierPair barriers() const { return BarrierPair{lower_barrier_, upper_barrier_}; }
  double lambda_min() const { return accumulator_.min_eigenvalue(); }
  double lambda_max() const { return accumulator_.max_eigenvalue(); }
  const HermitianAccumulator& accumulator() const { return accumulator_; }

 private:
  void check_containment() const;

  Index dimension_;
  FrameBounds bounds_;
  double b_;
  double delta_;
  bool fixed_shifts_;
  double threshold_;

  double kappa_;
  double gamma_;
  Index total_iterations_;
  Index iteration_ = 0;

  HermitianAccumulator accumulator_;
  double lower_barrier_, upper_barrier_;      // l^{(k)}, u^{(k)} of the pending update
  double initial_delta_lower_, initial_delta_upper_;
  double initial_eps_lower_, initial_eps_upper_;
  double eps_lower_ = 0.0, eps_upper_ = 0.0;
  double delta_lower_ = 0.0, delta_upper_ = 0.0;

  bool scan_ready_ = false;
  // Cached per-iteration quantities for gate evaluation.
  Eigen::ArrayXd gap_lower_, gap_upper_;      // lambda_j - l^{(k)}, u^{(k)} - lambda_j
  double lower_denominator_ = 0.0;            // Phi_{l^{(k)}} - Phi_{l^{(k-1)}}
  double upper_denominator_ = 0.0;            // Phi^{u^{(k-1)}} - Phi^{u^{(k)}}
};

// Algorithm "BSS": deterministic weighted subsampling of the frame rows down
// to at most ceil(b m) elements with certified bounds [A, gamma B (1+Delta)].
BssResult bss_subsample(const Eigen::Ref<const CMatrix>& rows, FrameBounds bounds,
                        const BssConfig& cfg);

}  // namespace framesub

#endif  // FRAMESUB_BSS_HPP

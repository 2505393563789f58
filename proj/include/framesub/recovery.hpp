#ifndef FRAMESUB_RECOVERY_HPP
#define FRAMESUB_RECOVERY_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "framesub/frame.hpp"
#include "framesub/rng.hpp"
#include "framesub/strategies.hpp"

namespace framesub {

// Sampling domain D: either a box in R^d carrying the uniform probability
// measure, or an explicit finite point set with uniform counting measure.
struct Domain {
  RVector lower;
  RVector upper;
  std::vector<RVector> points;  // nonempty => discrete domain

  bool discrete() const { return !points.empty(); }
  Index dimension() const {
    return discrete() ? points.front().size() : lower.size();
  }

  static Domain unit_box(Index d) {
    return Domain{RVector::Zero(d), RVector::Ones(d), {}};
  }
};

// Callable orthonormal basis eta_1..eta_m of the reconstruction space V_m.
// Orthonormality in L_2(D, nu) is the caller's contract.
struct BasisSpec {
  Index size = 0;  // m
  std::function<Complex(Index k, const RVector& x)> evaluate;  // k in [0, m)
  Domain domain;
};

struct NodeSet {
  std::vector<RVector> nodes;
  RVector weights;  // optional (size 0 or nodes.size()), nonnegative

  Index size() const { return static_cast<Index>(nodes.size()); }
  Index dimension() const { return nodes.empty() ? 0 : nodes.front().size(); }
};

// Truncated singular data of the embedding Id_{K,nu}: sigma_k descending > 0,
// right singular functions e_k (point-wise callables), kernel diagonal
// K(x,x), and the trace integral of K. Left singular functions eta_k = e_k /
// sigma_k are derived.
struct SpectralModel {
  Index truncation = 0;  // N
  RVector singular_values;
  std::function<Complex(Index k, const RVector& x)> right_singular;  // e_k, k in [0, N)
  std::function<double(const RVector& x)> kernel_diagonal;
  double trace = 0.0;
};

void validate_model(const SpectralModel& model);

// phi^{V_m}(x) = 1/2 + (1/2m) sum_k |eta_k(x)|^2; always >= 1/2.
double density_finite(const BasisSpec& basis, const RVector& x);

// rho_m(x) = 1/2 ( (1/m) sum_{k<=m} |eta_k|^2
//                  + (K(x,x) - sum_{k<=m} |e_k|^2) / (trace - sum_{k<=m} sigma_k^2) ).
// Tail numerators within -1e-10 * max(1, K(x,x)) are clamped to zero; larger
// negativity raises invalid-model.
double rkhs_density(const SpectralModel& model, Index m, const RVector& x);

// w_m(x) = rho_m(x)^{-1/2} where rho_m(x) > 0, else 0.
double rkhs_weight(const SpectralModel& model, Index m, const RVector& x);

using NodeSampler = std::function<RVector(Rng&)>;

// Sampler for mu = phi^{V_m} dnu. Box domains use rejection sampling with the
// envelope (1 + max_k sup |eta_k|^2)/2 estimated on a grid; discrete domains
// sample the density directly.
NodeSampler make_density_sampler(const BasisSpec& basis, Index envelope_grid_per_axis = 64);

struct MzNodeConfig {
  double p = 0.1;
  double t = 2.0 / 3.0;
  double b = 1.5;
  double delta = 0.0;
  std::uint64_t seed = 0;
  bool redraw_until_valid = false;  // check the frame condition and redraw on failure
  Index max_redraws = 64;
  Traversal traversal = Traversal::seeded_permutation;
};

struct MzNodeResult {
  NodeSet nodes;              // n <= ceil(b m) subsampled nodes
  Index initial_count = 0;    // M drawn nodes
  double initial_lambda_min;  // lambda_min((1/M) Ltilde* Ltilde) of the draw
  Index redraws = 0;
  PlainBssResult plain;
};

// Draws M = ceil(4/t^2 m log(m/p)) nodes from mu, forms the row-normalized
// matrix with entries eta_k(x)/sqrt(phi(x)), and PlainBSS-subsamples it down
// to at most ceil(b m) nodes satisfying a Marcinkiewicz-Zygmund inequality
// with probability >= 1-p.
MzNodeResult generate_mz_nodes(const BasisSpec& basis, const NodeSampler& sampler,
                               const MzNodeConfig& cfg);
MzNodeResult generate_mz_nodes(const BasisSpec& basis, const MzNodeConfig& cfg);

// Design matrix L with L(i, k) = eta_k(x^i).
CMatrix design_matrix(const BasisSpec& basis, const NodeSet& nodes);

// lambda_min((1/n) sum_i v(x^i) v(x^i)*) with v(x) = (eta_k(x))_k; positive
// exactly when the node set certifies an MZ inequality on V_m.
double mz_lambda_min(const BasisSpec& basis, const NodeSet& nodes);

// Weighted or plain least squares coefficients via the pseudo-inverse.
// weighted == true uses the node weights (all ones when absent).
CVector least_squares_recover(const BasisSpec& basis, const NodeSet& nodes,
                              const CVector& samples, bool weighted = false);

struct Quadrature {
  std::vector<RVector> nodes;
  RVector weights;  // integration weights against nu
};

// Tensor grid with uniform weights; exact enough for smooth integrands when
// per_axis is large. nu is the uniform probability measure on the box.
Quadrature tensor_grid_quadrature(const Domain& box, Index per_axis);

struct RecoveryReport {
  Index n = 0;
  Index m = 0;
  double b = 0.0;
  double mz_lambda_min = 0.0;
  double l2_error = 0.0;
  double linf_best_proxy = 0.0;
  double ratio = 0.0;
  Index grid_size = 0;
};

RecoveryReport recovery_error_report(const BasisSpec& basis, const NodeSet& nodes,
                                     const std::function<Complex(const RVector&)>& f,
                                     const Quadrature& reference, double b = 0.0);

}  // namespace framesub

#endif  // FRAMESUB_RECOVERY_HPP

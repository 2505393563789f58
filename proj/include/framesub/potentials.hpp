#ifndef FRAMESUB_POTENTIALS_HPP
#define FRAMESUB_POTENTIALS_HPP

#include <Eigen/Dense>

#include <limits>

#include "framesub/frame.hpp"

namespace framesub {

struct BarrierPair {
  double lower;  // l
  double upper;  // u
};

// Hermitian PSD iteration matrix with a cached eigendecomposition. Immutable
// after construction; gate evaluations against one instance may run
// concurrently. Resolvent quadratic forms are always evaluated through the
// cached eigensystem: one O(m^3) factorization, O(m^2) per candidate vector.
class HermitianAccumulator {
 public:
  explicit HermitianAccumulator(const Eigen::Ref<const CMatrix>& matrix);

  static HermitianAccumulator Zero(Index dimension);

  Index dimension() const { return matrix_.rows(); }
  const CMatrix& matrix() const { return matrix_; }
  const RVector& eigenvalues() const { return eigenvalues_; }  // ascending
  const CMatrix& eigenvectors() const { return eigenvectors_; }
  double min_eigenvalue() const { return eigenvalues_[0]; }
  double max_eigenvalue() const { return eigenvalues_[eigenvalues_.size() - 1]; }

 private:
  HermitianAccumulator() = default;

  CMatrix matrix_;
  RVector eigenvalues_;
  CMatrix eigenvectors_;
};

inline constexpr double kGateInfinity = std::numeric_limits<double>::infinity();

// Phi_l(A) = tr([A - lI]^{-1}) = sum_j 1/(lambda_j - l); requires l < lambda_min.
double lower_potential(const HermitianAccumulator& acc, double lower_barrier);

// Phi^u(A) = tr([uI - A]^{-1}) = sum_j 1/(u - lambda_j); requires u > lambda_max.
double upper_potential(const HermitianAccumulator& acc, double upper_barrier);

// L_A(v; l, delta_L). Returns +infinity for delta_L == 0 (with 1/inf = 0);
// delta_L < 0 is unsupported, the algorithm only shifts barriers right.
double lower_gate(const HermitianAccumulator& acc, const CVector& v, double lower_barrier,
                  double delta_lower);

// U_A(v; u, delta_U), dual to lower_gate.
double upper_gate(const HermitianAccumulator& acc, const CVector& v, double upper_barrier,
                  double delta_upper);

// A + t v v*, with a freshly computed eigen-cache.
HermitianAccumulator rank1_update(const HermitianAccumulator& acc, const CVector& v, double t);

namespace detail {

// Barrier preconditions are checked with this slack to absorb round-off at
// the barrier itself.
inline double barrier_slack(double lambda) { return 1e-12 * std::max(1.0, std::abs(lambda)); }

void require_lower_barrier(double lower_barrier, double lambda_min);
void require_upper_barrier(double upper_barrier, double lambda_max);

}  // namespace detail

}  // namespace framesub

#endif  // FRAMESUB_POTENTIALS_HPP

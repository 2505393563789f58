#include "framesub/potentials.hpp"

#include <cmath>

namespace framesub {

namespace detail {

void require_lower_barrier(double lower_barrier, double lambda_min) {
  if (lambda_min - lower_barrier <= barrier_slack(lambda_min))
    throw Error(ErrorCode::barrier_violation, "lower barrier is not below the spectrum");
}

void require_upper_barrier(double upper_barrier, double lambda_max) {
  if (upper_barrier - lambda_max <= barrier_slack(lambda_max))
    throw Error(ErrorCode::barrier_violation, "upper barrier is not above the spectrum");
}

}  // namespace detail

HermitianAccumulator::HermitianAccumulator(const Eigen::Ref<const CMatrix>& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() < 1)
    throw_invalid_input("accumulator matrix must be square and nonempty");
  if (!matrix.allFinite()) throw_invalid_input("accumulator matrix has non-finite entries");
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw_invalid_input("accumulator matrix is not Hermitian");
  matrix_ = 0.5 * (matrix + matrix.adjoint());  // exact Hermitian symmetry for the solver
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(matrix_);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::internal_invariant, "accumulator eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

HermitianAccumulator HermitianAccumulator::Zero(Index dimension) {
  if (dimension < 1) throw_invalid_input("accumulator dimension must be positive");
  HermitianAccumulator acc;
  acc.matrix_ = CMatrix::Zero(dimension, dimension);
  acc.eigenvalues_ = RVector::Zero(dimension);
  acc.eigenvectors_ = CMatrix::Identity(dimension, dimension);
  return acc;
}

double lower_potential(const HermitianAccumulator& acc, double lower_barrier) {
  detail::require_lower_barrier(lower_barrier, acc.min_eigenvalue());
  return (acc.eigenvalues().array() - lower_barrier).inverse().sum();
}

double upper_potential(const HermitianAccumulator& acc, double upper_barrier) {
  detail::require_upper_barrier(upper_barrier, acc.max_eigenvalue());
  return (upper_barrier - acc.eigenvalues().array()).inverse().sum();
}

double lower_gate(const HermitianAccumulator& acc, const CVector& v, double lower_barrier,
                  double delta_lower) {
  if (v.size() != acc.dimension()) throw_invalid_input("gate vector dimension mismatch");
  if (delta_lower < 0.0)
    throw_invalid_input("lower_gate: negative barrier shifts are unsupported");
  if (delta_lower == 0.0) return kGateInfinity;
  const double shifted = lower_barrier + delta_lower;
  detail::require_lower_barrier(shifted, acc.min_eigenvalue());
  const RVector w = (acc.eigenvectors().adjoint() * v).cwiseAbs2();
  const Eigen::ArrayXd gap = acc.eigenvalues().array() - shifted;
  const double quad1 = (w.array() / gap).sum();
  const double quad2 = (w.array() / gap.square()).sum();
  const double denom = lower_potential(acc, shifted) - lower_potential(acc, lower_barrier);
  return quad2 / denom - quad1;
}

double upper_gate(const HermitianAccumulator& acc, const CVector& v, double upper_barrier,
                  double delta_upper) {
  if (v.size() != acc.dimension()) throw_invalid_input("gate vector dimension mismatch");
  if (delta_upper < 0.0)
    throw_invalid_input("upper_gate: negative barrier shifts are unsupported");
  if (delta_upper == 0.0) return kGateInfinity;
  const double shifted = upper_barrier + delta_upper;
  detail::require_upper_barrier(upper_barrier, acc.max_eigenvalue());
  const RVector w = (acc.eigenvectors().adjoint() * v).cwiseAbs2();
  const Eigen::ArrayXd gap = shifted - acc.eigenvalues().array();
  const double quad1 = (w.array() / gap).sum();
  const double quad2 = (w.array() / gap.square()).sum();
  const double denom = upper_potential(acc, upper_barrier) - upper_potential(acc, shifted);
  return quad2 / denom + quad1;
}

HermitianAccumulator rank1_update(const HermitianAccumulator& acc, const CVector& v, double t) {
  if (v.size() != acc.dimension()) throw_invalid_input("update vector dimension mismatch");
  if (!std::isfinite(t)) throw_invalid_input("update weight must be finite");
  CMatrix next = acc.matrix();
  next.selfadjointView<Eigen::Lower>().rankUpdate(v, t);
  next = next.selfadjointView<Eigen::Lower>();
  return HermitianAccumulator(next);
}

}  // namespace framesub

#ifndef FRAMESUB_FRAME_HPP
#define FRAMESUB_FRAME_HPP

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "framesub/errors.hpp"

namespace framesub {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Relative threshold below which eigenvalues of a Gram matrix are reported
// as zero. Suppresses negative round-off eigenvalues of PSD matrices.
inline constexpr double kEigenvalueClamp = 1e-12;

// Analysis operator of a frame (y^i)_{i=1..M} in C^m: the M x m matrix whose
// i-th row represents y^i.
struct FrameMatrix {
  CMatrix rows;

  Index count() const { return rows.rows(); }      // M
  Index dimension() const { return rows.cols(); }  // m

  // Validates M >= 1, m >= 1 and finiteness of all entries.
  static FrameMatrix fromMatrix(CMatrix matrix);
};

// Extreme eigenvalues of the m x m Gram matrix Y*Y. A frame certificate
// requires lower > 0; lower == 0 signals a rank-deficient system.
struct FrameBounds {
  double lower = 0.0;  // A
  double upper = 0.0;  // B

  double condition() const { return upper / lower; }
};

// Index subset J of [0, parent_count) with nonnegative weights, aligned.
struct WeightedSubframe {
  std::vector<Index> indices;
  RVector weights;
  Index parent_count = 0;

  Index size() const { return static_cast<Index>(indices.size()); }
};

void validate_frame(const Eigen::Ref<const CMatrix>& rows);
void validate_subframe(const WeightedSubframe& sub, Index parent_count);

double frobenius_norm_sq(const Eigen::Ref<const CMatrix>& rows);

FrameBounds frame_bounds(const Eigen::Ref<const CMatrix>& rows);

// Gram matrix of the weighted subframe: sum_{i in J} s_i y^i (y^i)*.
CMatrix weighted_gram(const Eigen::Ref<const CMatrix>& rows, const WeightedSubframe& sub);

FrameBounds weighted_frame_bounds(const Eigen::Ref<const CMatrix>& rows, const WeightedSubframe& sub);

// Bounds of the plain (unit-weight) subframe selected by `indices`.
FrameBounds subframe_bounds(const Eigen::Ref<const CMatrix>& rows, const std::vector<Index>& indices);

// Same, but `indices` may contain duplicates; each occurrence contributes one
// unit-weight copy (multiset semantics of the random draws).
FrameBounds multiset_bounds(const Eigen::Ref<const CMatrix>& rows, const std::vector<Index>& indices);

// Aggregates duplicate indices of a draw multiset into distinct indices whose
// weight is the occurrence count times `unit_weight`.
WeightedSubframe aggregate_multiset(const std::vector<Index>& indices, Index parent_count,
                                    double unit_weight = 1.0);

// Eigenvalue bounds of an explicitly formed Hermitian Gram matrix, with the
// same round-off clamp as frame_bounds.
FrameBounds gram_bounds(const Eigen::Ref<const CMatrix>& gram);

}  // namespace framesub

#endif  // FRAMESUB_FRAME_HPP

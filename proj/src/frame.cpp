#include "framesub/frame.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

namespace framesub {

void validate_frame(const Eigen::Ref<const CMatrix>& rows) {
  if (rows.rows() < 1 || rows.cols() < 1) throw_invalid_input("frame must have M >= 1 rows and m >= 1 columns");
  if (!rows.allFinite()) throw_invalid_input("frame contains non-finite entries");
}

FrameMatrix FrameMatrix::fromMatrix(CMatrix matrix) {
  validate_frame(matrix);
  return FrameMatrix{std::move(matrix)};
}

void validate_subframe(const WeightedSubframe& sub, Index parent_count) {
  if (sub.parent_count != parent_count)
    throw_invalid_input("subframe parent count does not match the frame");
  if (static_cast<Index>(sub.indices.size()) != sub.weights.size())
    throw_invalid_input("subframe index and weight lists differ in length");
  std::unordered_set<Index> seen;
  for (std::size_t j = 0; j < sub.indices.size(); ++j) {
    const Index i = sub.indices[j];
    if (i < 0 || i >= parent_count) throw_invalid_input("subframe index out of range");
    if (!seen.insert(i).second) throw_invalid_input("subframe indices must be distinct");
    const double w = sub.weights[static_cast<Index>(j)];
    if (!(w >= 0.0) || !std::isfinite(w)) throw_invalid_input("subframe weights must be finite and nonnegative");
  }
}

double frobenius_norm_sq(const Eigen::Ref<const CMatrix>& rows) {
  validate_frame(rows);
  return rows.squaredNorm();
}

FrameBounds gram_bounds(const Eigen::Ref<const CMatrix>& gram) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::internal_invariant, "eigendecomposition failed");
  const RVector& lambda = solver.eigenvalues();
  double upper = std::max(lambda[lambda.size() - 1], 0.0);
  double lower = lambda[0];
  if (lower < kEigenvalueClamp * upper) lower = 0.0;
  return FrameBounds{lower, upper};
}

FrameBounds frame_bounds(const Eigen::Ref<const CMatrix>& rows) {
  validate_frame(rows);
  // Gram formed explicitly: m x m, never the M x M frame operator.
  const CMatrix gram = rows.adjoint() * rows;
  return gram_bounds(gram);
}

CMatrix weighted_gram(const Eigen::Ref<const CMatrix>& rows, const WeightedSubframe& sub) {
  validate_frame(rows);
  validate_subframe(sub, rows.rows());
  const Index m = rows.cols();
  const Index k = sub.size();
  CMatrix selected(k, m);
  for (Index j = 0; j < k; ++j)
    selected.row(j) = std::sqrt(sub.weights[j]) * rows.row(sub.indices[static_cast<std::size_t>(j)]);
  return selected.adjoint() * selected;
}

FrameBounds weighted_frame_bounds(const Eigen::Ref<const CMatrix>& rows, const WeightedSubframe& sub) {
  return gram_bounds(weighted_gram(rows, sub));
}

FrameBounds subframe_bounds(const Eigen::Ref<const CMatrix>& rows, const std::vector<Index>& indices) {
  WeightedSubframe sub;
  sub.indices = indices;
  sub.weights = RVector::Ones(static_cast<Index>(indices.size()));
  sub.parent_count = rows.rows();
  return weighted_frame_bounds(rows, sub);
}

WeightedSubframe aggregate_multiset(const std::vector<Index>& indices, Index parent_count,
                                    double unit_weight) {
  std::map<Index, double> acc;
  for (Index i : indices) {
    if (i < 0 || i >= parent_count) throw_invalid_input("multiset index out of range");
    acc[i] += unit_weight;
  }
  WeightedSubframe sub;
  sub.parent_count = parent_count;
  sub.indices.reserve(acc.size());
  sub.weights.resize(static_cast<Index>(acc.size()));
  Index j = 0;
  for (const auto& [index, weight] : acc) {
    sub.indices.push_back(index);
    sub.weights[j++] = weight;
  }
  return sub;
}

FrameBounds multiset_bounds(const Eigen::Ref<const CMatrix>& rows, const std::vector<Index>& indices) {
  return weighted_frame_bounds(rows, aggregate_multiset(indices, rows.rows()));
}

}  // namespace framesub

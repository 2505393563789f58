#include "framesub/precondition.hpp"

#include <cmath>

#include "framesub/bss.hpp"
#include "framesub/rng.hpp"

namespace framesub {

namespace {

// Modified Gram-Schmidt sweep of v against the first `count` columns of basis,
// run twice; classical single-pass GS is not numerically reliable.
void project_out(const CMatrix& basis, Index count, CVector& v) {
  for (int pass = 0; pass < 2; ++pass)
    for (Index j = 0; j < count; ++j) v -= basis.col(j).dot(v) * basis.col(j);
}

CVector random_unit_vector(Index size, Rng& rng) {
  CVector v(size);
  for (Index i = 0; i < size; ++i) v[i] = Complex(rng.normal(), rng.normal());
  return v;
}

}  // namespace

PreconditionedFrame orthonormalize_columns(const Eigen::Ref<const CMatrix>& rows,
                                           const OrthonormalizeOptions& opts) {
  validate_frame(rows);
  const Index count = rows.rows();
  const Index m = rows.cols();
  if (count < m) throw_invalid_input("orthonormalize_columns requires M >= m");

  CMatrix basis(count, m);
  std::vector<ColumnOrigin> origin(static_cast<std::size_t>(m), ColumnOrigin::original);
  std::vector<Index> dependent;
  Index accepted = 0;

  for (Index c = 0; c < m; ++c) {
    CVector v = rows.col(c);
    const double original_norm = v.norm();
    project_out(basis, accepted, v);
    const double residual = v.norm();
    if (residual <= opts.dependence_tol * original_norm || residual == 0.0) {
      dependent.push_back(c);
      continue;
    }
    basis.col(accepted++) = v / residual;
  }

  // Complete rank-deficient systems with random orthogonal directions; the
  // randomization avoids adversarial alignment with the data.
  Rng rng(opts.seed);
  for (Index c : dependent) {
    CVector v;
    double residual = 0.0;
    do {
      v = random_unit_vector(count, rng);
      project_out(basis, accepted, v);
      residual = v.norm();
    } while (residual <= 1e-8 * std::sqrt(static_cast<double>(count)));
    basis.col(accepted++) = v / residual;
    origin[static_cast<std::size_t>(c)] = ColumnOrigin::completion;
  }

  // Restore the original column positions for the completed slots.
  CMatrix ordered(count, m);
  Index next_original = 0;
  Index next_completion = accepted - static_cast<Index>(dependent.size());
  for (Index c = 0; c < m; ++c) {
    if (origin[static_cast<std::size_t>(c)] == ColumnOrigin::completion)
      ordered.col(c) = basis.col(next_completion++);
    else
      ordered.col(c) = basis.col(next_original++);
  }

  return PreconditionedFrame{std::move(ordered), std::move(origin)};
}

PreconditionedFrame extend_with_blocks(const Eigen::Ref<const CMatrix>& rows, double alpha,
                                       const OrthonormalizeOptions& opts) {
  validate_frame(rows);
  if (!(alpha > 0.0)) throw_invalid_input("extend_with_blocks requires alpha > 0");
  const Index count = rows.rows();
  const Index m = rows.cols();
  const Index blocks = ceil_count(alpha * static_cast<double>(m));
  if (blocks > count) throw_invalid_input("extend_with_blocks requires M >= ceil(alpha m)");
  if (count % blocks != 0)
    throw_invalid_input("M must be divisible by ceil(alpha m); zero_pad the frame first");

  const Index block_length = count / blocks;
  const double entry = std::sqrt(static_cast<double>(blocks) / static_cast<double>(count));

  CMatrix basis(count, blocks + m);
  basis.setZero();
  for (Index k = 0; k < blocks; ++k)
    basis.col(k).segment(k * block_length, block_length).setConstant(entry);

  Index accepted = blocks;
  std::vector<ColumnOrigin> origin(static_cast<std::size_t>(blocks), ColumnOrigin::block);
  for (Index c = 0; c < m; ++c) {
    CVector v = rows.col(c);
    const double original_norm = v.norm();
    if (original_norm == 0.0) continue;
    project_out(basis, accepted, v);
    const double residual = v.norm();
    if (residual <= opts.dependence_tol * original_norm) continue;
    basis.col(accepted++) = v / residual;
    origin.push_back(ColumnOrigin::original);
  }

  return PreconditionedFrame{basis.leftCols(accepted), std::move(origin)};
}

CMatrix zero_pad(const Eigen::Ref<const CMatrix>& rows, Index target_count) {
  validate_frame(rows);
  if (target_count < rows.rows()) throw_invalid_input("zero_pad cannot shrink the frame");
  CMatrix padded = CMatrix::Zero(target_count, rows.cols());
  padded.topRows(rows.rows()) = rows;
  return padded;
}

Index padded_count(Index count, Index divisor) {
  if (divisor < 1) throw_invalid_input("padded_count requires a positive divisor");
  const Index remainder = count % divisor;
  return remainder == 0 ? count : count + (divisor - remainder);
}

}  // namespace framesub

#ifndef FRAMESUB_PRECONDITION_HPP
#define FRAMESUB_PRECONDITION_HPP

#include <cstdint>
#include <vector>

#include "framesub/frame.hpp"

namespace framesub {

enum class ColumnOrigin {
  original,    // orthonormalized column of Y
  block,       // block-indicator column d^k
  completion,  // random orthogonal completion of a rank-deficient system
};

// A tight M x m' system whose range contains range(Y): the rows form a tight
// frame with bounds (1, 1) once the columns are orthonormal.
struct PreconditionedFrame {
  CMatrix tight_rows;                // M x m', orthonormal columns
  std::vector<ColumnOrigin> origin;  // per column

  Index count() const { return tight_rows.rows(); }
  Index dimension() const { return tight_rows.cols(); }  // m'
};

struct OrthonormalizeOptions {
  // Columns whose post-projection norm falls below this fraction of their
  // original norm are declared dependent.
  double dependence_tol = 1e-10;
  std::uint64_t seed = 0;  // drives the random orthogonal completion
};

// Gram-Schmidt on the columns of Y (modified, one reorthogonalization pass).
// Dependent columns are replaced in place by random orthogonal completions,
// so the result always has exactly m orthonormal columns. Requires M >= m.
PreconditionedFrame orthonormalize_columns(const Eigen::Ref<const CMatrix>& rows,
                                           const OrthonormalizeOptions& opts = {});

// Block construction: ceil(alpha m) orthonormal indicator columns scaled by
// sqrt(ceil(alpha m)/M), extended by the columns of Y to an orthonormal basis
// of their joint span. Every row satisfies |row|^2 >= ceil(alpha m)/M.
// Requires M divisible by ceil(alpha m); zero_pad the frame first otherwise.
PreconditionedFrame extend_with_blocks(const Eigen::Ref<const CMatrix>& rows, double alpha,
                                       const OrthonormalizeOptions& opts = {});

// Appends zero rows until the frame has target_count rows.
CMatrix zero_pad(const Eigen::Ref<const CMatrix>& rows, Index target_count);

// Smallest multiple of `divisor` that is >= count (used with zero_pad; the
// result is always < count + divisor).
Index padded_count(Index count, Index divisor);

}  // namespace framesub

#endif  // FRAMESUB_PRECONDITION_HPP

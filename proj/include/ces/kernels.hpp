#pragma once

// Per-sample reductions used inside the fixed-point iterations. Each has a plain serial
// reference and an OpenMP version. The OpenMP versions cut the rows into fixed blocks of
// kBlockRows, reduce each block independently and add the block partials in block order,
// so their output does not depend on the number of threads.

#include "ces/types.hpp"

namespace ces::kernels {

inline constexpr int kBlockRows = 256;

namespace serial {

/// q_i = |L^{-1}(x_i - mu)|^2 for the lower Cholesky factor L of the scatter.
Vector mahalanobis_batch(const DataMatrix& data, const Vector& mu, const Matrix& chol_lower);

/// sum_i w_i (x_i - mu)(x_i - mu)^T.
Matrix weighted_scatter(const DataMatrix& data, const Vector& mu, const Vector& w);

/// sum_i w_i x_i.
Vector weighted_sum(const DataMatrix& data, const Vector& w);

}  // namespace serial

Vector mahalanobis_batch(const DataMatrix& data, const Vector& mu, const Matrix& chol_lower);
Matrix weighted_scatter(const DataMatrix& data, const Vector& mu, const Vector& w);
Vector weighted_sum(const DataMatrix& data, const Vector& w);

}  // namespace ces::kernels

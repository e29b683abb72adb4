#include "ces/kernels.hpp"

#include <stdexcept>
#include <vector>

namespace ces::kernels {

namespace {

void check(const DataMatrix& data, const Vector& mu) {
  if (mu.size() != data.cols()) throw std::invalid_argument("kernels: dimension mismatch");
}

void check_weights(const DataMatrix& data, const Vector& w) {
  if (w.size() != data.rows()) throw std::invalid_argument("kernels: weight vector has the wrong length");
}

int block_count(Eigen::Index n) { return static_cast<int>((n + kBlockRows - 1) / kBlockRows); }

// Block-local scatter: accumulate the lower triangle only, then mirror.
void scatter_rows(const DataMatrix& data, const Vector& mu, const Vector& w, Eigen::Index begin, Eigen::Index end,
                  Matrix& acc) {
  const Eigen::Index m = data.cols();
  Vector r(m);
  for (Eigen::Index i = begin; i < end; ++i) {
    r = data.row(i).transpose() - mu;
    const double wi = w(i);
    for (Eigen::Index c = 0; c < m; ++c) {
      const double rc = wi * r(c);
      for (Eigen::Index k = c; k < m; ++k) acc(k, c) += rc * r(k);
    }
  }
}

void mirror_lower(Matrix& s) {
  for (Eigen::Index c = 0; c < s.cols(); ++c) {
    for (Eigen::Index k = c + 1; k < s.rows(); ++k) s(c, k) = s(k, c);
  }
}

}  // namespace

namespace serial {

Vector mahalanobis_batch(const DataMatrix& data, const Vector& mu, const Matrix& chol_lower) {
  check(data, mu);
  const Eigen::Index n = data.rows();
  Vector q(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector r = data.row(i).transpose() - mu;
    q(i) = chol_lower.triangularView<Eigen::Lower>().solve(r).squaredNorm();
  }
  return q;
}

Matrix weighted_scatter(const DataMatrix& data, const Vector& mu, const Vector& w) {
  check(data, mu);
  check_weights(data, w);
  const Eigen::Index m = data.cols();
  Matrix s = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const Vector r = data.row(i).transpose() - mu;
    s.noalias() += w(i) * r * r.transpose();
  }
  return s;
}

Vector weighted_sum(const DataMatrix& data, const Vector& w) {
  check_weights(data, w);
  Vector s = Vector::Zero(data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i) s += w(i) * data.row(i).transpose();
  return s;
}

}  // namespace serial

Vector mahalanobis_batch(const DataMatrix& data, const Vector& mu, const Matrix& chol_lower) {
  check(data, mu);
  const Eigen::Index n = data.rows();
  const Eigen::Index m = data.cols();
  Vector q(n);
  // Rows are independent, so any schedule gives identical results.
#pragma omp parallel
  {
    Vector r(m);
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      r = data.row(i).transpose() - mu;
      chol_lower.triangularView<Eigen::Lower>().solveInPlace(r);
      q(i) = r.squaredNorm();
    }
  }
  return q;
}

Matrix weighted_scatter(const DataMatrix& data, const Vector& mu, const Vector& w) {
  check(data, mu);
  check_weights(data, w);
  const Eigen::Index n = data.rows();
  const Eigen::Index m = data.cols();
  const int blocks = block_count(n);
  std::vector<Matrix> partial(blocks, Matrix::Zero(m, m));
#pragma omp parallel for schedule(static)
  for (int b = 0; b < blocks; ++b) {
    const Eigen::Index begin = static_cast<Eigen::Index>(b) * kBlockRows;
    const Eigen::Index end = std::min<Eigen::Index>(n, begin + kBlockRows);
    scatter_rows(data, mu, w, begin, end, partial[b]);
  }
  Matrix s = Matrix::Zero(m, m);
  for (const Matrix& p : partial) s += p;
  mirror_lower(s);
  return s;
}

Vector weighted_sum(const DataMatrix& data, const Vector& w) {
  check_weights(data, w);
  const Eigen::Index n = data.rows();
  const Eigen::Index m = data.cols();
  const int blocks = block_count(n);
  std::vector<Vector> partial(blocks, Vector::Zero(m));
#pragma omp parallel for schedule(static)
  for (int b = 0; b < blocks; ++b) {
    const Eigen::Index begin = static_cast<Eigen::Index>(b) * kBlockRows;
    const Eigen::Index end = std::min<Eigen::Index>(n, begin + kBlockRows);
    for (Eigen::Index i = begin; i < end; ++i) partial[b] += w(i) * data.row(i).transpose();
  }
  Vector s = Vector::Zero(m);
  for (const Vector& p : partial) s += p;
  return s;
}

}  // namespace ces::kernels

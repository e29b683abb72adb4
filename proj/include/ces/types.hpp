#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ces {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Row-per-draw sample storage; rows are contiguous so per-sample kernels stream.
using DataMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CDataMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raised when a matrix that must be positive definite is not (within the PD tolerance).
class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for numerical failures: quadrature or root finding that cannot meet its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense symmetric matrix. Symmetry is checked on construction (relative 1e-10) and the
/// stored value is the exact symmetrization of the input.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(int dim) { return SymMatrix(Matrix::Identity(dim, dim)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix m_;
};

}  // namespace ces

#pragma once

// Structured linear algebra used throughout: vec/vecs, commutation and duplication
// maps, Kronecker products, square roots of PD matrices, Mahalanobis forms and Schur
// complements.

#include <vector>

#include "ces/types.hpp"

namespace ces {

/// Column-major stacking of a rectangular matrix.
Vector vec(const Matrix& m);

/// Inverse of vec for a rows x cols target.
Matrix unvec(const Vector& v, int rows, int cols);

/// Stacks the lower triangle column by column (supradiagonal entries dropped).
/// Throws std::invalid_argument for non-symmetric input.
Vector vecs(const Matrix& m);

/// Rebuilds the symmetric matrix from its half-vectorization.
SymMatrix unvecs(const Vector& v, int dim);

/// Index map of the commutation matrix: (K v)[i] = v[perm[i]], so that
/// K vec(C) = vec(C^T) for r x c matrices C.
std::vector<int> commutation_index(int r, int c);

/// Index map of the duplication matrix: (D s)[i] = s[map[i]].
std::vector<int> duplication_index(int m);

/// Dense (rc x rc) commutation matrix. Guarded to r*c <= 1024.
Matrix commutation(int r, int c);

/// Dense m^2 x m(m+1)/2 duplication matrix. Guarded to m <= 32.
Matrix duplication(int m);

/// Moore-Penrose inverse (D^T D)^{-1} D^T of the duplication matrix.
Matrix duplication_pinv(int m);

Matrix kron(const Matrix& a, const Matrix& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Smallest eigenvalue must exceed m * eps * largest eigenvalue.
bool is_positive_definite(const Matrix& s);

/// Throws NotPositiveDefinite with the offending eigenvalue in the message.
void require_positive_definite(const Matrix& s, const char* what);

/// Symmetric square root from the eigendecomposition: A = A^T, A A^T = S.
Matrix psd_sqrt(const SymMatrix& s);

/// Lower Cholesky factor, the alternative square root (S = L L^T).
Matrix cholesky_sqrt(const SymMatrix& s);

/// Inverse of a PD matrix via Cholesky.
Matrix spd_inverse(const SymMatrix& s);

/// log |S| from the Cholesky factor.
double log_det_spd(const SymMatrix& s);

/// (x - mu)^T S^{-1} (x - mu) through a triangular solve.
double mahalanobis(const Vector& x, const Vector& mu, const SymMatrix& s);

struct SchurBlocks {
  Matrix s11;
  Matrix s12;
  Matrix s21;
  Matrix s22;
  SymMatrix s2given1;
};

/// Partition S after the first `split` coordinates and form S22 - S21 S11^{-1} S12.
SchurBlocks schur_conditional(const SymMatrix& s, int split);

/// sigma1 (I + K)(B kron B) + sigma2 vec(B) vec(B)^T, kept factored.
class StructuredCov {
 public:
  StructuredCov(double sigma1, double sigma2, SymMatrix base);

  double sigma1() const { return sigma1_; }
  double sigma2() const { return sigma2_; }
  const SymMatrix& base() const { return base_; }
  int dim() const { return base_.dim(); }

  /// Lower bound -2 sigma1 / m that sigma2 must respect.
  double sigma2_bound() const { return -2.0 * sigma1_ / dim(); }

  Matrix dense() const;

 private:
  double sigma1_;
  double sigma2_;
  SymMatrix base_;
};

}  // namespace ces

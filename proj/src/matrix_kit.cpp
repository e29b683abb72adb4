#include "ces/matrix_kit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ces {

namespace {

constexpr double kSymmetryTol = 1e-10;

bool is_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTol * scale;
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw std::invalid_argument("SymMatrix: expected a non-empty square matrix");
  }
  if (!m.allFinite()) throw std::invalid_argument("SymMatrix: non-finite entries");
  if (!is_symmetric(m)) throw std::invalid_argument("SymMatrix: matrix is not symmetric");
  m_ = 0.5 * (m + m.transpose());
}

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw std::invalid_argument("unvec: size mismatch");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Vector vecs(const Matrix& m) {
  if (!is_symmetric(m)) throw std::invalid_argument("vecs: matrix is not symmetric");
  const int n = static_cast<int>(m.rows());
  Vector out(n * (n + 1) / 2);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) out(k++) = m(i, j);
  }
  return out;
}

SymMatrix unvecs(const Vector& v, int dim) {
  if (v.size() != dim * (dim + 1) / 2) throw std::invalid_argument("unvecs: size mismatch");
  Matrix m(dim, dim);
  int k = 0;
  for (int j = 0; j < dim; ++j) {
    for (int i = j; i < dim; ++i) {
      m(i, j) = v(k);
      m(j, i) = v(k);
      ++k;
    }
  }
  return SymMatrix(m);
}

std::vector<int> commutation_index(int r, int c) {
  if (r < 1 || c < 1) throw std::invalid_argument("commutation: dimensions must be >= 1");
  std::vector<int> perm(static_cast<std::size_t>(r) * c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) perm[j + i * c] = i + j * r;
  }
  return perm;
}

std::vector<int> duplication_index(int m) {
  if (m < 1) throw std::invalid_argument("duplication: dimension must be >= 1");
  std::vector<int> map(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const int hi = std::max(i, j);
      const int lo = std::min(i, j);
      map[i + j * m] = lo * m - lo * (lo - 1) / 2 + hi - lo;
    }
  }
  return map;
}

Matrix commutation(int r, int c) {
  if (static_cast<long>(r) * c > 1024) throw std::invalid_argument("commutation: too large for dense form");
  const auto perm = commutation_index(r, c);
  const int n = r * c;
  Matrix k = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) k(i, perm[i]) = 1.0;
  return k;
}

Matrix duplication(int m) {
  if (m > 32) throw std::invalid_argument("duplication: too large for dense form");
  const auto map = duplication_index(m);
  Matrix d = Matrix::Zero(m * m, m * (m + 1) / 2);
  for (int i = 0; i < m * m; ++i) d(i, map[i]) = 1.0;
  return d;
}

Matrix duplication_pinv(int m) {
  const Matrix d = duplication(m);
  // D^T D is diagonal (1 on diagonal entries, 2 off the diagonal).
  const Vector counts = d.colwise().sum();
  return counts.cwiseInverse().asDiagonal() * d.transpose();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

bool is_positive_definite(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() == 0 || !s.allFinite()) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  return hi > 0.0 && lo > s.rows() * std::numeric_limits<double>::epsilon() * hi;
}

void require_positive_definite(const Matrix& s, const char* what) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": expected a square matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || !(lo > s.rows() * std::numeric_limits<double>::epsilon() * hi)) {
    std::ostringstream os;
    os << what << ": matrix is not positive definite (eigenvalues in [" << lo << ", " << hi << "])";
    throw NotPositiveDefinite(os.str());
  }
}

Matrix psd_sqrt(const SymMatrix& s) {
  require_positive_definite(s.matrix(), "psd_sqrt");
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.matrix());
  const Matrix& v = es.eigenvectors();
  Matrix a = v * es.eigenvalues().cwiseSqrt().asDiagonal() * v.transpose();
  return 0.5 * (a + a.transpose());
}

Matrix cholesky_sqrt(const SymMatrix& s) {
  require_positive_definite(s.matrix(), "cholesky_sqrt");
  Eigen::LLT<Matrix> llt(s.matrix());
  return llt.matrixL();
}

Matrix spd_inverse(const SymMatrix& s) {
  require_positive_definite(s.matrix(), "spd_inverse");
  Eigen::LLT<Matrix> llt(s.matrix());
  Matrix inv = llt.solve(Matrix::Identity(s.dim(), s.dim()));
  return 0.5 * (inv + inv.transpose());
}

double log_det_spd(const SymMatrix& s) {
  require_positive_definite(s.matrix(), "log_det_spd");
  Eigen::LLT<Matrix> llt(s.matrix());
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double mahalanobis(const Vector& x, const Vector& mu, const SymMatrix& s) {
  if (x.size() != s.dim() || mu.size() != s.dim()) {
    throw std::invalid_argument("mahalanobis: dimension mismatch");
  }
  require_positive_definite(s.matrix(), "mahalanobis");
  Eigen::LLT<Matrix> llt(s.matrix());
  const Vector z = llt.matrixL().solve(x - mu);
  return z.squaredNorm();
}

SchurBlocks schur_conditional(const SymMatrix& s, int split) {
  const int m = s.dim();
  if (split < 1 || split >= m) throw std::invalid_argument("schur_conditional: split must be in [1, m)");
  const int m2 = m - split;
  const Matrix& a = s.matrix();
  SchurBlocks out;
  out.s11 = a.topLeftCorner(split, split);
  out.s12 = a.topRightCorner(split, m2);
  out.s21 = a.bottomLeftCorner(m2, split);
  out.s22 = a.bottomRightCorner(m2, m2);
  if (!is_positive_definite(out.s11)) throw NotPositiveDefinite("schur_conditional: S11 is singular");
  Eigen::LLT<Matrix> llt(out.s11);
  const Matrix cond = out.s22 - out.s21 * llt.solve(out.s12);
  out.s2given1 = SymMatrix(0.5 * (cond + cond.transpose()));
  return out;
}

StructuredCov::StructuredCov(double sigma1, double sigma2, SymMatrix base)
    : sigma1_(sigma1), sigma2_(sigma2), base_(std::move(base)) {
  if (!(sigma1_ > 0.0)) throw std::invalid_argument("StructuredCov: sigma1 must be positive");
  const double bound = sigma2_bound();
  if (sigma2_ < bound - 1e-10 * std::max(1.0, std::abs(bound))) {
    throw std::invalid_argument("StructuredCov: sigma2 below -2 sigma1 / m");
  }
}

Matrix StructuredCov::dense() const {
  const int m = dim();
  const Matrix& b = base_.matrix();
  const Matrix bb = kron(b, b);
  const auto perm = commutation_index(m, m);
  // (I + K)(B kron B): row i of K(B kron B) is row perm[i] of B kron B.
  Matrix out = bb;
  for (int i = 0; i < m * m; ++i) out.row(i) += bb.row(perm[i]);
  out *= sigma1_;
  const Vector vb = vec(b);
  out += sigma2_ * vb * vb.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace ces

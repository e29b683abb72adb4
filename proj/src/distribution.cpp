#include "ces/distribution.hpp"

#include <algorithm>
#include <sstream>

#include "ces/matrix_kit.hpp"

namespace ces {

namespace {

constexpr double kKappaSlack = 1e-10;

double rel_scale(const CMatrix& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

void require_hermitian_pd(const CMatrix& s, const char* what) {
  if (s.rows() != s.cols() || s.rows() == 0) throw std::invalid_argument(std::string(what) + ": expected square matrix");
  if ((s - s.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * rel_scale(s)) {
    throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(s, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || !(lo > s.rows() * std::numeric_limits<double>::epsilon() * hi)) {
    std::ostringstream os;
    os << what << ": matrix is not positive definite (smallest eigenvalue " << lo << ")";
    throw NotPositiveDefinite(os.str());
  }
}

}  // namespace

DistributionSpec::DistributionSpec(FamilyKernel k, Vector m, SymMatrix s)
    : kernel(std::move(k)), mu(std::move(m)), sigma(std::move(s)) {
  if (kernel.is_complex()) throw std::invalid_argument("DistributionSpec: kernel must be real");
  if (mu.size() != kernel.dim() || sigma.dim() != kernel.dim()) {
    throw std::invalid_argument("DistributionSpec: dimension mismatch between kernel, mu and sigma");
  }
  require_positive_definite(sigma.matrix(), "DistributionSpec sigma");
}

std::string DistributionSpec::describe() const {
  std::ostringstream os;
  os.precision(15);
  os << kernel.describe() << " mu=[" << mu.transpose() << "]";
  return os.str();
}

ComplexSpec::ComplexSpec(FamilyKernel k, CVector m, CMatrix s, std::optional<CMatrix> w)
    : kernel(std::move(k)), mu(std::move(m)), sigma(std::move(s)), omega(std::move(w)) {
  if (!kernel.is_complex()) throw std::invalid_argument("ComplexSpec: kernel must be complex");
  const int d = kernel.dim();
  if (mu.size() != d || sigma.rows() != d) throw std::invalid_argument("ComplexSpec: dimension mismatch");
  require_hermitian_pd(sigma, "ComplexSpec sigma");
  sigma = 0.5 * (sigma + sigma.adjoint());
  if (omega) {
    if (omega->rows() != d || omega->cols() != d) throw std::invalid_argument("ComplexSpec: omega dimension mismatch");
    if ((*omega - omega->transpose()).cwiseAbs().maxCoeff() > 1e-10 * rel_scale(*omega)) {
      throw std::invalid_argument("ComplexSpec: omega must be complex symmetric");
    }
    *omega = 0.5 * (*omega + omega->transpose());
    kernel = kernel.with_realness(Realness::ComplexNoncircular);
    nc_factorization(*this);  // throws when (Sigma, Omega) is infeasible
  } else {
    kernel = kernel.with_realness(Realness::ComplexCircular);
  }
}

CMatrix ComplexSpec::extended_scatter() const {
  const int d = dim();
  CMatrix w = omega ? *omega : CMatrix::Zero(d, d);
  CMatrix e(2 * d, 2 * d);
  e << sigma, w, w.conjugate(), sigma.conjugate();
  return e;
}

std::string ComplexSpec::describe() const {
  std::ostringstream os;
  os.precision(15);
  os << kernel.describe() << " mu=[" << mu.transpose() << "]";
  return os.str();
}

DistributionSpec composite_real_spec(const ComplexSpec& spec) {
  const int d = spec.dim();
  const CMatrix& s = spec.sigma;
  const CMatrix w = spec.omega ? *spec.omega : CMatrix::Zero(d, d);
  Matrix bar(2 * d, 2 * d);
  bar.topLeftCorner(d, d) = (s + w).real();
  bar.topRightCorner(d, d) = (w - s).imag();
  bar.bottomLeftCorner(d, d) = (w + s).imag();
  bar.bottomRightCorner(d, d) = (s - w).real();
  bar *= 0.5;
  return DistributionSpec(spec.kernel.as_real_composite(), composite_real_vector(spec.mu),
                          SymMatrix(0.5 * (bar + bar.transpose())));
}

Vector composite_real_vector(const CVector& x) {
  Vector v(2 * x.size());
  v << x.real(), x.imag();
  return v;
}

CMatrix hermitian_sqrt(const CMatrix& s) {
  require_hermitian_pd(s, "hermitian_sqrt");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(s);
  const CMatrix& v = es.eigenvectors();
  CMatrix a = v * es.eigenvalues().cwiseSqrt().cast<Complex>().asDiagonal() * v.adjoint();
  return 0.5 * (a + a.adjoint());
}

NcFactorization nc_factorization(const ComplexSpec& spec) {
  const int d = spec.dim();
  const CMatrix a0 = hermitian_sqrt(spec.sigma);
  if (!spec.omega) return {a0, Vector::Zero(d)};

  // B = A0^{-1} Omega A0^{-T} is complex symmetric; its Takagi values are the positive
  // eigenvalues of the real symmetric embedding [[Re B, Im B], [Im B, -Re B]], and an
  // eigenvector (x; y) gives the Takagi vector u = x + i y with B conj(u) = sigma u.
  Eigen::PartialPivLU<CMatrix> lu(a0);
  const CMatrix a0inv = lu.inverse();
  CMatrix b = a0inv * (*spec.omega) * a0inv.transpose();
  b = 0.5 * (b + b.transpose());
  Matrix emb(2 * d, 2 * d);
  emb << b.real(), b.imag(), b.imag(), -b.real();
  Eigen::SelfAdjointEigenSolver<Matrix> es(emb);
  const Vector& ev = es.eigenvalues();  // ascending
  const double tol = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());

  CMatrix u = CMatrix::Zero(d, d);
  Vector kappa = Vector::Zero(d);
  int filled = 0;
  for (int j = 2 * d - 1; j >= 0 && filled < d; --j) {
    if (ev(j) <= tol) break;
    const Vector x = es.eigenvectors().col(j).head(d);
    const Vector y = es.eigenvectors().col(j).tail(d);
    CVector col(d);
    for (int i = 0; i < d; ++i) col(i) = Complex(x(i), y(i));
    u.col(filled) = col.normalized();
    kappa(filled) = ev(j);
    ++filled;
  }
  // Zero Takagi values: complete U to a unitary matrix by complex Gram-Schmidt.
  for (int e = 0; e < d && filled < d; ++e) {
    CVector v = CVector::Zero(d);
    v(e) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < filled; ++j) v -= u.col(j).dot(v) * u.col(j);
    }
    if (v.norm() < 1e-8) continue;
    u.col(filled++) = v.normalized();
  }
  for (int i = 0; i < d; ++i) {
    if (kappa(i) > 1.0 + kKappaSlack) {
      std::ostringstream os;
      os << "NC-CES: infeasible (Sigma, Omega) pair, kappa_" << i << " = " << kappa(i) << " > 1";
      throw std::invalid_argument(os.str());
    }
    kappa(i) = std::min(kappa(i), 1.0);
  }
  return {a0 * u, kappa};
}

}  // namespace ces

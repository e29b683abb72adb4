#pragma once

#include <optional>
#include <string>

#include "ces/families.hpp"
#include "ces/types.hpp"

namespace ces {

/// Real elliptical law RES(mu, Sigma, g).
struct DistributionSpec {
  DistributionSpec(FamilyKernel kernel, Vector mu, SymMatrix sigma);

  int dim() const { return kernel.dim(); }
  std::string describe() const;

  FamilyKernel kernel;
  Vector mu;
  SymMatrix sigma;
};

/// Complex elliptical law, circular when omega is absent.
struct ComplexSpec {
  ComplexSpec(FamilyKernel kernel, CVector mu, CMatrix sigma, std::optional<CMatrix> omega = std::nullopt);

  int dim() const { return kernel.dim(); }
  bool circular() const { return !omega.has_value(); }
  /// [[Sigma, Omega], [conj(Omega), conj(Sigma)]].
  CMatrix extended_scatter() const;
  std::string describe() const;

  FamilyKernel kernel;
  CVector mu;
  CMatrix sigma;
  std::optional<CMatrix> omega;
};

/// Law of (Re x, Im x): real kernel of dimension 2m and scatter
/// 1/2 [[Re(S+W), Im(W-S)], [Im(W+S), Re(S-W)]] with S = Sigma, W = Omega.
DistributionSpec composite_real_spec(const ComplexSpec& spec);

/// Stacks (Re x, Im x).
Vector composite_real_vector(const CVector& x);

/// Sigma = A A^H and Omega = A diag(kappa) A^T with A = Sigma^{1/2} U and U unitary from the
/// Takagi factorization of Sigma^{-1/2} Omega Sigma^{-T/2}. kappa is sorted descending.
struct NcFactorization {
  CMatrix a;
  Vector kappa;
};

NcFactorization nc_factorization(const ComplexSpec& spec);

/// Hermitian square root of a Hermitian positive definite matrix.
CMatrix hermitian_sqrt(const CMatrix& s);

}  // namespace ces

#pragma once

// Asymptotic covariances of sqrt(n)(vec(Sigma_hat) - vec(Sigma)) for the sample covariance,
// ML, M and Tyler estimators, all of the form
//   sigma1 (I + K)(S kron S) + sigma2 vec(S) vec(S)^T
// around the estimator's limit S.

#include <optional>
#include <string>

#include "ces/estimate.hpp"
#include "ces/families.hpp"
#include "ces/matrix_kit.hpp"
#include "ces/weights.hpp"

namespace ces {

struct EstimatorAsymptotics {
  std::string estimator;
  /// Covariance of sqrt(n)(mu_hat - mu); absent when the location is not estimated.
  std::optional<SymMatrix> r_mu;
  StructuredCov r_sigma;
  /// Scale ambiguity: the estimator converges to Sigma / scale (1 for SCM about the covariance).
  double scale = 1.0;

  int dim() const { return r_sigma.dim(); }
  Matrix dense() const { return r_sigma.dense(); }
  /// sigma2 + 2 sigma1 / m (>= 0 always, 0 for Tyler).
  double bound_gap() const { return r_sigma.sigma2() - r_sigma.sigma2_bound(); }
};

/// SCM: sigma1 = 1 + kappa, sigma2 = kappa around the covariance E(Q)/m Sigma.
EstimatorAsymptotics scm_asymptotics(const FamilyKernel& kernel, const SymMatrix& sigma);

/// ML: sigma0 = m / E[Q phi^2], sigma1 = m(m+2)/E[Q^2 phi^2], sigma2 = -2 s1(1-s1)/(2+m(1-s1)).
EstimatorAsymptotics ml_asymptotics(const FamilyKernel& kernel, const SymMatrix& sigma);

/// Root of E[s Q u2(s Q)] = m against the kernel's Q law.
double m_functional_scale(const FamilyKernel& kernel, const WeightFunction& u2);

/// M-estimator with location weight u1 and scatter weight u2, around V = Sigma / s.
EstimatorAsymptotics m_asymptotics(const FamilyKernel& kernel, const WeightFunction& u1, const WeightFunction& u2,
                                   const SymMatrix& sigma);

/// Tyler: sigma1 = 1 + 2/m, sigma2 = -(2/m)(1 + 2/m), around Sigma scaled to trace m.
EstimatorAsymptotics tyler_asymptotics(int m, const SymMatrix& sigma);

/// Gradient of the scale functional s at V (as a vec-indexed m^2 vector).
Vector shape_gradient(const SymMatrix& v, ShapeScale scale);

/// P_s(V) = I - vec(V) grad s(V)^T.
Matrix shape_projector(const SymMatrix& v, ShapeScale scale);

/// Delta-method covariance of vec(V_hat_s): P_s R(V_s) P_s^T with R the structured
/// covariance of `base` evaluated at the shape matrix. `v` is rescaled so that s(v) = 1.
Matrix shape_asymptotics(const EstimatorAsymptotics& base, ShapeScale scale, const SymMatrix& v);

/// Closed form for the determinant shape: sigma1 (I+K)(V kron V) - (2 sigma1/m) vec(V) vec(V)^T.
Matrix shape_asymptotics_det(double sigma1, const SymMatrix& v);

}  // namespace ces

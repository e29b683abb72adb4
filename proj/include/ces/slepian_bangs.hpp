#pragma once

// Fisher information of a parametric elliptical model mu(alpha), Sigma(alpha) (and Omega(alpha)
// for noncircular complex data), per sample:
//   a0 dmu^T Sigma^{-1} dmu + dvec(Sigma)^T [a1 (Sigma^{-T} kron Sigma^{-1}) + a2 vec(Sigma^{-1}) vec^T(Sigma^{-1})] dvec(Sigma)
// with (a0, a1, a2) built from the kernel's xi coefficients.

#include <functional>
#include <optional>
#include <string>

#include "ces/families.hpp"
#include "ces/types.hpp"

namespace ces {

/// Real parameters alpha (p of them). Real models fill the real callbacks; complex ones the
/// complex callbacks, with omega only for noncircular models. Jacobians are with respect to
/// alpha: dmu is m x p, dsigma / domega are m^2 x p (column-major vec).
struct ParametricModel {
  std::string name;
  int dim = 0;
  int p = 0;
  Realness realness = Realness::Real;

  std::function<Vector(const Vector&)> mu;
  std::function<Matrix(const Vector&)> sigma;
  std::function<Matrix(const Vector&)> dmu;
  std::function<Matrix(const Vector&)> dsigma;

  std::function<CVector(const Vector&)> cmu;
  std::function<CMatrix(const Vector&)> csigma;
  std::function<CMatrix(const Vector&)> comega;
  std::function<CMatrix(const Vector&)> dcmu;
  std::function<CMatrix(const Vector&)> dcsigma;
  std::function<CMatrix(const Vector&)> dcomega;
};

/// Largest deviation between the supplied Jacobians and central differences, relative to
/// max(1, |J|).
double jacobian_error(const ParametricModel& model, const Vector& alpha);

/// Throws std::invalid_argument when jacobian_error exceeds tol.
void validate_model(const ParametricModel& model, const Vector& alpha, double tol = 1e-5);

struct SbCoefficients {
  double a0;
  double a1;
  double a2;
};

/// Real: (xi1, xi2/2, (xi2-1)/4). Circular: (2 xi1, xi2, xi2 - 1). Noncircular: as real with
/// the complex xi.
SbCoefficients sb_coefficients(const FamilyKernel& kernel);

/// Per-sample FIM (p x p). The kernel's realness must match the model.
Matrix slepian_bangs_fim(const ParametricModel& model, const Vector& alpha, const FamilyKernel& kernel);

/// FIM^{-1} / n. Throws NumericalError naming the null direction when the FIM is singular.
Matrix crb(const ParametricModel& model, const Vector& alpha, const FamilyKernel& kernel, int n);

struct DecouplingReport {
  /// Parameters that move mu; the others only move the scatter.
  std::vector<int> mu_params;
  std::vector<int> sigma_params;
  double offblock_norm = 0.0;
  bool decoupled = true;
  std::string describe() const;
};

DecouplingReport fim_block_decoupling_check(const ParametricModel& model, const Vector& alpha,
                                            const FamilyKernel& kernel, double tol = 1e-10);

/// Built-in models: "location-scalar" mu = alpha 1, "location-vector" mu = alpha,
/// "scatter-full" Sigma = unvecs(alpha), "scatter-scaled-identity" Sigma = alpha Sigma0.
/// The part that is not parameterized stays at mu0 or Sigma0. Complex realness gives the
/// same structure with complex mu (real alpha) and Hermitian Sigma; noncircular models keep
/// omega0 fixed (zero when absent).
ParametricModel builtin_model(const std::string& name, const Vector& mu0, const Matrix& sigma0,
                              Realness realness = Realness::Real, const std::optional<CMatrix>& omega0 = std::nullopt);

/// Value of alpha that reproduces (mu0, Sigma0) in a built-in model.
Vector builtin_alpha(const std::string& name, const Vector& mu0, const Matrix& sigma0);

std::vector<std::string> builtin_model_names();

}  // namespace ces

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ces/families.hpp"
#include "ces/types.hpp"
#include "ces/weights.hpp"

namespace ces {

/// Scale functional s(S) used to turn a scatter into a shape matrix V = S / s(S):
/// tr(S)/m, S_11 or |S|^{1/m}.
enum class ShapeScale { None, Trace, TopLeft, Determinant };
enum class LocationMode { Joint, KnownMu };

std::string to_string(ShapeScale s);
ShapeScale parse_shape_scale(const std::string& text);

struct FitConfig {
  int max_iter = 500;
  /// Relative Frobenius change of Sigma plus the scaled change of mu (Tyler: residual of
  /// the implicit equation).
  double tol = 1e-10;
  LocationMode location = LocationMode::Joint;
  Vector known_mu;
  ShapeScale shape = ShapeScale::None;
  std::optional<Matrix> init_sigma;
};

FitConfig known_mu_config(const Vector& mu, double tol = 1e-10, int max_iter = 500);

struct EstimateResult {
  Vector mu_hat;
  SymMatrix sigma_hat;
  int iterations = 0;
  std::vector<double> residual_trace;
  bool converged = false;
  ShapeScale scale_constraint_applied = ShapeScale::None;
  /// Negative log-likelihood along the iterations (ML only) and whether it never increased.
  std::vector<double> nll_trace;
  bool nll_monotone = true;
  /// Sample moments only: the scatter is singular.
  bool singular = false;
  std::string note;
};

/// Sample mean and unbiased SCM 1/(n-1) sum (x - mean)(x - mean)^T.
EstimateResult sample_moments(const DataMatrix& data);

/// Solutions of the ML estimating equations with weight phi; Gaussian kernels are solved in
/// closed form (iterations = 1).
EstimateResult fit_ml(const DataMatrix& data, const FamilyKernel& kernel, const FitConfig& cfg = {});

/// M-estimator. KnownMu: the scale-adjusted fixed point starting from the SCM about mu.
/// Joint: plain alternation of the location and scatter equations from the coordinatewise
/// median; no convergence theory exists for it, so check `converged`.
EstimateResult fit_maronna(const DataMatrix& data, const WeightFunction& u1, const WeightFunction& u2,
                           const FitConfig& cfg = {});

/// Tyler's estimator about a known center, trace normalized to m.
EstimateResult fit_tyler(const DataMatrix& data, const FitConfig& cfg);

/// ||S - (m/n) sum r r^T / (r^T S^{-1} r)||_F / ||S||_F.
double tyler_residual(const DataMatrix& data, const Vector& mu, const SymMatrix& s);

double shape_functional(const SymMatrix& s, ShapeScale scale);
SymMatrix shape_normalize(const SymMatrix& s, ShapeScale scale);

/// n/2 log|Sigma| - sum log g(Q_i).
double negative_log_likelihood(const DataMatrix& data, const Vector& mu, const SymMatrix& sigma,
                               const FamilyKernel& kernel);

enum class Method { SampleMoments, ML, Maronna, Tyler };

std::string to_string(Method m);
Method parse_method(const std::string& text);

struct EstimatorConfig {
  Method method = Method::SampleMoments;
  FitConfig fit;
  std::optional<FamilyKernel> kernel;
  std::optional<WeightFunction> u1;
  std::optional<WeightFunction> u2;
};

EstimateResult fit(const DataMatrix& data, const EstimatorConfig& cfg);

}  // namespace ces

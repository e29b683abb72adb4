#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <vector>

#include "ces/types.hpp"

namespace ces::harness {

/// max that propagates NaN, unlike std::max, so a broken statistic can never pass a check.
double nan_max(std::initializer_list<double> values);
inline double nan_max(double a, double b) { return nan_max({a, b}); }

struct KsResult {
  double statistic;
  double p_value;
  std::size_t n;
};

/// One-sample Kolmogorov-Smirnov test against a continuous cdf; asymptotic p-value with the
/// usual sqrt(n) + 0.12 + 0.11/sqrt(n) small-sample adjustment.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// D such that P(D_n > D) = level under the null, from the same asymptotic law.
double ks_critical_value(std::size_t n, double level);

/// n times the covariance over replicates of vec(estimate); needs at least `min_reps` replicates.
Matrix empirical_cov_of_vec(const std::vector<Matrix>& estimates, int n, int min_reps = 200);

/// max_ij |E_ij - T_ij| / sqrt(T_ii T_jj).
double max_relative_entry_error(const Matrix& empirical, const Matrix& target);

struct MeanSe {
  double mean;
  double se;
};

/// Mean and its standard error from `batches` contiguous batch means.
MeanSe batch_means(const std::vector<double>& x, int batches = 50);

/// kappa_hat = m/(m+2) mean(Q^2)/mean(Q)^2 - 1 with a delta-method standard error.
MeanSe kurtosis_from_q(const Vector& q, int m);

struct FourthMomentResult {
  /// max |emp - theory| / se over all index quadruples i <= j <= k <= l.
  double max_z;
  int quadruples;
};

/// Compares mean(x_i x_j x_k x_l) of centered data with (1 + kappa)(C_ij C_kl + C_ik C_jl + C_il C_jk).
FourthMomentResult fourth_moment_identity(const DataMatrix& centered, const Matrix& cov, double kappa);

}  // namespace ces::harness

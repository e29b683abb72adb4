#pragma once

// Registered check kinds. Every check reports a statistic that passes when it is at most the
// threshold.
//
//   q-law-ks              KS distance of Q against chi2 / F / Gamma reference laws
//   kurtosis              |kappa_hat - kappa| in standard errors
//   tyler-residual        implicit-equation residual of Tyler's estimate
//   tyler-scale-invariance  change of Tyler's estimate under per-sample rescaling
//   ml-gaussian-closed-form  Gaussian ML vs the sample mean and 1/n SCM
//   asymptotic-cov        max relative entry error of n cov(vec Sigma_hat) vs the closed form
//   crb-gaussian-location Gaussian location CRB vs Sigma/n
//   crb-efficiency        Monte Carlo variance of the scalar-location ML estimate vs the CRB
//   xi-closed-form        quadrature xi vs the closed forms
//   xi-bridge             complex xi on m vs real xi on 2m
//   pdf-scale-ambiguity   log-pdf change under (c Sigma, lambda c)
//   sigma2-bound          violations of sigma2 >= -2 sigma1/m and of Tyler's equality
//   fourth-moment         fourth-moment identity, max z-score
//   marginal-generator    marginal generator vs the lower-dimensional generator
//   conditional-regression  least-squares slope and residual scatter vs the Schur formulas
//   nc-pseudo-covariance  E[x x^T] vs Omega for noncircular data

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ces/harness/plan.hpp"

namespace ces::harness {

struct CheckContext {
  const ExperimentPlan& plan;
  const CheckSpec& check;
  /// First Philox stream reserved for this check; replicate r uses stream_base + r.
  std::uint64_t stream_base;
};

struct CheckOutcome {
  double statistic;
  double threshold;
  std::string detail;
  std::vector<std::pair<std::string, Matrix>> artifacts;
};

using CheckFn = std::function<CheckOutcome(const CheckContext&)>;

const std::map<std::string, CheckFn>& check_registry();
std::vector<std::string> check_kinds();

/// Closed-form kurtosis used as the oracle of the kurtosis check.
double kurtosis_closed_form(const FamilyKernel& k);

/// Default scatter of the checks: 0.5^{|i-j|} sqrt((1+i)(1+j)).
Matrix default_sigma(int m);

}  // namespace ces::harness

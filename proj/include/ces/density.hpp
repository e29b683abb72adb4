#pragma once

#include "ces/distribution.hpp"
#include "ces/quadrature.hpp"

namespace ces {

struct LogDensityValue {
  double log_pdf;
  double pdf;
};

LogDensityValue make_log_density(double log_pdf);

/// |Sigma|^{-1/2} g((x-mu)^T Sigma^{-1} (x-mu)), evaluated in log space.
LogDensityValue pdf_res(const DistributionSpec& spec, const Vector& x);

/// |Sigma~|^{-1/2} g_c(1/2 (x~-mu~)^H Sigma~^{-1} (x~-mu~)) with x~ = (x, conj x); for circular
/// specs this is |Sigma|^{-1} g_c((x-mu)^H Sigma^{-1} (x-mu)).
LogDensityValue pdf_complex(const ComplexSpec& spec, const CVector& x);

/// Density of Q and of R = sqrt(Q).
double pdf_q(const FamilyKernel& k, double q);
double pdf_r(const FamilyKernel& k, double r);

/// Density generator of an m1-dimensional marginal of a real m-dimensional kernel,
/// g_{m1|m}(u) = pi^{m2/2}/Gamma(m2/2) int_0^inf s^{m2/2-1} g(u + s) ds.
double marginal_generator(const FamilyKernel& k, int m1, double u, const QuadConfig& cfg = {});

struct ConditionalParams {
  Vector mu_2given1;
  SymMatrix sigma_2given1;
};

/// Center and scatter of x2 | x1 after splitting at `split`.
ConditionalParams conditional_params(const DistributionSpec& spec, int split, const Vector& x1);

/// Conditional density p(x2 | x1) = p(x) / p(x1); compound-Gaussian and Gaussian kernels only.
LogDensityValue pdf_conditional_cg(const DistributionSpec& spec, int split, const Vector& x);

/// (2 pi)^{-m/2} |Sigma|^{-1/2} int tau^{-m/2} exp(-Q/(2 tau)) dF(tau), by quadrature over the
/// texture (or a finite sum for discrete textures).
LogDensityValue pdf_cg_mixture(const DistributionSpec& spec, const Vector& x, const QuadConfig& cfg = {});

/// Same mixture integral for the density generator alone, g(t) = int (2 pi tau)^{-m/2} e^{-t/(2 tau)} dF.
double log_cg_mixture_generator(const FamilyKernel& k, double t, const QuadConfig& cfg = {});

}  // namespace ces

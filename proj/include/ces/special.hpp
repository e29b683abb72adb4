#pragma once

namespace ces {

/// log K_alpha(x) for x > 0. Boost's cyl_bessel_k below x = 500, the large-argument
/// Hankel expansion above it, and the small-argument leading term if Boost overflows.
double log_bessel_k(double alpha, double x);

/// Ratio K_{alpha-1}(x) / K_alpha(x), computed in log space.
double bessel_k_ratio(double alpha, double x);

/// Limiting Kolmogorov distribution P(K <= t) = 1 - 2 sum (-1)^{k-1} exp(-2 k^2 t^2).
double kolmogorov_cdf(double t);

/// Survival function 1 - kolmogorov_cdf(t), accurate in the upper tail.
double kolmogorov_sf(double t);

/// Quantile of the limiting Kolmogorov law by bisection.
double kolmogorov_quantile(double p);

}  // namespace ces

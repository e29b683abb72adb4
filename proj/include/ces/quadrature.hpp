#pragma once

// Adaptive quadrature on finite intervals and on the half line, built on Boost's exp-sinh
// rule. A finite piece [x0, x1] is mapped to [0, inf) by x = x0 + (x1 - x0) v / (1 + v); the
// half line is cut at the scale c (and any breakpoints) and the last piece is stretched by c.
// Double-exponential clustering at the ends absorbs the integrable endpoint singularities
// of the modular densities.

#include <functional>
#include <vector>

namespace ces {

struct QuadConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  /// Characteristic scale c of half-line integrals; put it near the bulk of the integrand.
  double scale = 1.0;
  /// Extra split points (in the original variable) where the integrand has kinks or peaks.
  std::vector<double> breakpoints;
};

struct QuadResult {
  double value;
  double error;
};

/// Integral of f over [a, b]. Throws NumericalError if the tolerance cannot be met.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadConfig& cfg = {});

/// Integral of f over [0, inf).
QuadResult integrate_half_line(const std::function<double(double)>& f, const QuadConfig& cfg = {});

/// Integral of f over [a, inf).
QuadResult integrate_tail(const std::function<double(double)>& f, double a, const QuadConfig& cfg = {});

}  // namespace ces

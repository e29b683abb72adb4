#include "ces/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace ces {

namespace {

constexpr double kHankelSwitch = 500.0;

double log_bessel_k_hankel(double alpha, double x) {
  const double mu = 4.0 * alpha * alpha;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) >= std::abs(term)) break;  // asymptotic series started diverging
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return 0.5 * std::log(boost::math::constants::half_pi<double>() / x) - x + std::log(sum);
}

// K_a(x) ~ Gamma(a)/2 (2/x)^a for a > 0, -log(x/2) - gamma for a = 0.
double log_bessel_k_small(double a, double x) {
  if (a == 0.0) return std::log(-std::log(0.5 * x) - boost::math::constants::euler<double>());
  return std::lgamma(a) - std::log(2.0) + a * (std::log(2.0) - std::log(x));
}

}  // namespace

double log_bessel_k(double alpha, double x) {
  if (!(x > 0.0)) throw std::domain_error("log_bessel_k: x must be positive");
  const double a = std::abs(alpha);
  if (x > kHankelSwitch) return log_bessel_k_hankel(a, x);
  try {
    const double k = boost::math::cyl_bessel_k(a, x);
    if (k > 0.0 && std::isfinite(k)) return std::log(k);
  } catch (const std::overflow_error&) {
  }
  return log_bessel_k_small(a, x);
}

double bessel_k_ratio(double alpha, double x) {
  return std::exp(log_bessel_k(alpha - 1.0, x) - log_bessel_k(alpha, x));
}

double kolmogorov_sf(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 0.2) return 1.0 - kolmogorov_cdf(t);
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

double kolmogorov_cdf(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 0.2) return 1.0 - kolmogorov_sf(t);
  // Small-t form: sqrt(2 pi)/t sum exp(-(2k-1)^2 pi^2 / (8 t^2)).
  const double pi2 = boost::math::constants::pi_sqr<double>();
  double sum = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double odd = 2.0 * k - 1.0;
    sum += std::exp(-odd * odd * pi2 / (8.0 * t * t));
  }
  return std::sqrt(2.0 * boost::math::constants::pi<double>()) / t * sum;
}

double kolmogorov_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("kolmogorov_quantile: p must be in (0, 1)");
  double lo = 0.0;
  double hi = 10.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace ces

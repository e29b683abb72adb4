#include "ces/weights.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace ces {

namespace weights {

WeightFunction constant(double c) {
  return {"constant", [c](double) { return c; }, [](double) { return 0.0; }, {}};
}

WeightFunction huber(int m, double q) {
  if (m < 1) throw std::invalid_argument("huber: m must be >= 1");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("huber: q must be in (0, 1)");
  const boost::math::chi_squared chi_m(m);
  const boost::math::chi_squared chi_m2(m + 2);
  const double k2 = boost::math::quantile(chi_m, q);
  // E[min(Q, k2)] = m F_{m+2}(k2) + k2 (1 - F_m(k2)) for Q ~ chi2_m.
  const double b = boost::math::cdf(chi_m2, k2) + k2 / m * (1.0 - q);
  std::ostringstream name;
  name << "huber(q=" << q << ")";
  return {name.str(), [k2, b](double t) { return t <= k2 ? 1.0 / b : k2 / (b * t); },
          [k2, b](double t) { return t <= k2 ? 0.0 : -k2 / (b * t * t); }, {k2}};
}

WeightFunction tyler(int m) {
  const double md = m;
  return {"tyler", [md](double t) { return md / t; }, [md](double t) { return -md / (t * t); }, {}};
}

WeightFunction ml_scatter(const FamilyKernel& k) {
  return {"ml:" + k.describe(), [k](double t) { return score_phi(k, t); },
          [k](double t) { return score_phi_derivative(k, t); }, {}};
}

WeightFunction ml_location(const FamilyKernel& k) { return location_from_scatter(ml_scatter(k)); }

WeightFunction location_from_scatter(const WeightFunction& u2) {
  std::vector<double> kinks;
  for (double k : u2.kinks) kinks.push_back(std::sqrt(k));
  return {u2.name + "@t^2", [u = u2.u](double t) { return u(t * t); },
          [du = u2.du](double t) { return 2.0 * t * du(t * t); }, kinks};
}

}  // namespace weights

std::string MaronnaConditions::describe() const {
  std::ostringstream os;
  os << "u2 nonincreasing=" << u2_nonincreasing << " psi2 nondecreasing=" << psi2_nondecreasing
     << " psi2 bounded=" << psi2_bounded << " sup psi2=" << psi2_sup << " (> m: " << psi2_sup_exceeds_m << ")";
  return os.str();
}

MaronnaConditions check_maronna_conditions(const WeightFunction& u2, int m) {
  MaronnaConditions c;
  double prev_u = std::numeric_limits<double>::infinity();
  double prev_psi = -std::numeric_limits<double>::infinity();
  double psi_at_1e6 = 0.0;
  for (int i = -80; i <= 120; ++i) {
    const double t = std::pow(10.0, i / 10.0);
    const double u = u2(t);
    const double p = t * u;
    if (u > prev_u * (1.0 + 1e-12) + 1e-300) c.u2_nonincreasing = false;
    if (p < prev_psi * (1.0 - 1e-12) - 1e-300) c.psi2_nondecreasing = false;
    prev_u = u;
    prev_psi = p;
    c.psi2_sup = std::max(c.psi2_sup, p);
    if (i == 60) psi_at_1e6 = p;
  }
  // Bounded: psi2 must have essentially stopped growing between 1e6 and 1e12.
  c.psi2_bounded = std::isfinite(c.psi2_sup) && c.psi2_sup <= 1.01 * psi_at_1e6 + 1e-12;
  c.psi2_sup_exceeds_m = c.psi2_sup > m;
  return c;
}

}  // namespace ces

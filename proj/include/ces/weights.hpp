#pragma once

// Weight functions for M-estimation. Scatter weights u2 act on the quadratic form t = Q,
// location weights u1 on its square root t = sqrt(Q); psi(t) = t u(t).

#include <functional>
#include <string>
#include <vector>

#include "ces/families.hpp"

namespace ces {

struct WeightFunction {
  std::string name;
  std::function<double(double)> u;
  std::function<double(double)> du;
  /// Arguments where u is not smooth; used as quadrature breakpoints.
  std::vector<double> kinks;

  double operator()(double t) const { return u(t); }
  double psi(double t) const { return t * u(t); }
  double dpsi(double t) const { return u(t) + t * du(t); }
};

namespace weights {

WeightFunction constant(double c = 1.0);

/// Huber scatter weight: 1/b for t <= k2 and k2/(b t) beyond, with k2 the q-quantile of
/// chi2_m and b = E[min(Q, k2)]/m under chi2_m (consistent at the Gaussian).
WeightFunction huber(int m, double q = 0.9);

/// u2(t) = m / t.
WeightFunction tyler(int m);

/// u2(t) = phi(t): the ML scatter weight of a kernel.
WeightFunction ml_scatter(const FamilyKernel& k);

/// u1(t) = phi(t^2): the ML location weight of a kernel.
WeightFunction ml_location(const FamilyKernel& k);

/// u1(t) = u2(t^2).
WeightFunction location_from_scatter(const WeightFunction& u2);

}  // namespace weights

/// Standard sufficient conditions for the scatter M-functional, checked on a log grid:
/// u2 nonincreasing, psi2 nondecreasing and bounded, sup psi2 > m.
struct MaronnaConditions {
  bool u2_nonincreasing = true;
  bool psi2_nondecreasing = true;
  bool psi2_bounded = true;
  double psi2_sup = 0.0;
  bool psi2_sup_exceeds_m = true;

  bool ok() const { return u2_nonincreasing && psi2_nondecreasing && psi2_bounded && psi2_sup_exceeds_m; }
  std::string describe() const;
};

MaronnaConditions check_maronna_conditions(const WeightFunction& u2, int m);

}  // namespace ces

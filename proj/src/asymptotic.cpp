#include "ces/asymptotic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ces {

namespace {

void check_real(const FamilyKernel& k, const SymMatrix& sigma, const char* who) {
  if (k.is_complex()) throw std::invalid_argument(std::string(who) + ": real kernel required");
  if (k.dim() != sigma.dim()) throw std::invalid_argument(std::string(who) + ": kernel and scatter dimensions differ");
}

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string(what) + " is not finite");
  return v;
}

QuadConfig with_kinks(const WeightFunction& u1, const WeightFunction& u2, double s) {
  QuadConfig cfg;
  cfg.rel_tol = 1e-11;
  for (double t : u2.kinks) cfg.breakpoints.push_back(t / s);
  for (double t : u1.kinks) cfg.breakpoints.push_back(t * t / s);
  return cfg;
}

}  // namespace

EstimatorAsymptotics scm_asymptotics(const FamilyKernel& kernel, const SymMatrix& sigma) {
  check_real(kernel, sigma, "scm_asymptotics");
  const double kappa = kurtosis(kernel);
  if (!std::isfinite(kappa)) throw NumericalError("scm_asymptotics: the fourth moment is infinite");
  const QLaw law(kernel);
  const double c = law.mean() / kernel.dim();
  const SymMatrix cov(c * sigma.matrix());
  return {"scm", cov, StructuredCov(1.0 + kappa, kappa, cov), 1.0 / c};
}

EstimatorAsymptotics ml_asymptotics(const FamilyKernel& kernel, const SymMatrix& sigma) {
  check_real(kernel, sigma, "ml_asymptotics");
  const XiCoefficients xi = sb_xi(kernel);
  const double m = kernel.dim();
  const double s0 = 1.0 / finite_or_throw(xi.xi1, "E[Q phi^2]");
  const double s1 = 1.0 / finite_or_throw(xi.xi2, "E[Q^2 phi^2]");
  const double s2 = -2.0 * s1 * (1.0 - s1) / (2.0 + m * (1.0 - s1));
  return {"ml", SymMatrix(s0 * sigma.matrix()), StructuredCov(s1, s2, sigma), 1.0};
}

double m_functional_scale(const FamilyKernel& kernel, const WeightFunction& u2) {
  const QLaw law(kernel);
  const double m = kernel.dim();
  auto f = [&](double s) {
    QuadConfig cfg;
    for (double t : u2.kinks) cfg.breakpoints.push_back(t / s);
    return law.expect([&](double q) { return u2.psi(s * q); }, cfg) - m;
  };
  double lo = 1.0, hi = 1.0;
  const double f1 = f(1.0);
  if (f1 == 0.0) return 1.0;
  int k = 0;
  if (f1 < 0.0) {
    while (f(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++k > 100) throw NumericalError("m_functional_scale: E[psi2(sQ)] never reaches m");
    }
  } else {
    while (f(lo) > 0.0) {
      hi = lo;
      lo *= 0.5;
      if (++k > 100) throw NumericalError("m_functional_scale: E[psi2(sQ)] stays above m");
    }
  }
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

EstimatorAsymptotics m_asymptotics(const FamilyKernel& kernel, const WeightFunction& u1, const WeightFunction& u2,
                                   const SymMatrix& sigma) {
  check_real(kernel, sigma, "m_asymptotics");
  const double m = kernel.dim();
  const double s = m_functional_scale(kernel, u2);
  const QLaw law(kernel);
  const QuadConfig cfg = with_kinks(u1, u2, s);

  const double alpha = law.expect(
                           [&](double q) {
                             const double p = u1.psi(std::sqrt(s * q));
                             return p * p;
                           },
                           cfg) /
                       m;
  const double beta = law.expect(
      [&](double q) {
        const double t = std::sqrt(s * q);
        return (1.0 - 1.0 / m) * u1(t) + u1.dpsi(t) / m;
      },
      cfg);
  const double a1 = law.expect(
                        [&](double q) {
                          const double p = u2.psi(s * q);
                          return p * p;
                        },
                        cfg) /
                    (m * (m + 2.0));
  const double a2 = law.expect([&](double q) { return s * q * u2.dpsi(s * q); }, cfg) / m;
  finite_or_throw(alpha * beta * a1 * a2, "M-estimator expectation");
  if (std::abs(a2) < 1e-12) throw NumericalError("m_asymptotics: a2 vanishes (scale-free weights, use Tyler)");

  const double d = 2.0 * a2 + m;
  const double s1 = (m + 2.0) * (m + 2.0) * a1 / (d * d);
  const double s2 = ((a1 - 1.0) - 2.0 * (a2 - 1.0) * a1 * (m + (m + 4.0) * a2) / (d * d)) / (a2 * a2);
  const SymMatrix v(sigma.matrix() / s);
  return {"m", SymMatrix(alpha / (beta * beta) * v.matrix()), StructuredCov(s1, s2, v), s};
}

EstimatorAsymptotics tyler_asymptotics(int m, const SymMatrix& sigma) {
  if (m != sigma.dim()) throw std::invalid_argument("tyler_asymptotics: dimension mismatch");
  const double s1 = 1.0 + 2.0 / m;
  const double tr = sigma.matrix().trace();
  const SymMatrix v(sigma.matrix() * (m / tr));
  return {"tyler", std::nullopt, StructuredCov(s1, -2.0 / m * s1, v), tr / m};
}

Vector shape_gradient(const SymMatrix& v, ShapeScale scale) {
  const int m = v.dim();
  Vector g = Vector::Zero(m * m);
  switch (scale) {
    case ShapeScale::None:
      throw std::invalid_argument("shape_gradient: a scale functional is required");
    case ShapeScale::TopLeft:
      g(0) = 1.0;
      break;
    case ShapeScale::Trace:
      g = vec(Matrix::Identity(m, m)) / m;
      break;
    case ShapeScale::Determinant:
      g = vec(spd_inverse(v)) * (shape_functional(v, scale) / m);
      break;
  }
  return g;
}

Matrix shape_projector(const SymMatrix& v, ShapeScale scale) {
  const int m = v.dim();
  return Matrix::Identity(m * m, m * m) - vec(v.matrix()) * shape_gradient(v, scale).transpose();
}

Matrix shape_asymptotics(const EstimatorAsymptotics& base, ShapeScale scale, const SymMatrix& v_in) {
  const SymMatrix v = shape_normalize(v_in, scale);
  const StructuredCov r(base.r_sigma.sigma1(), base.r_sigma.sigma2(), v);
  const Matrix p = shape_projector(v, scale);
  Matrix out = p * r.dense() * p.transpose();
  return 0.5 * (out + out.transpose());
}

Matrix shape_asymptotics_det(double sigma1, const SymMatrix& v_in) {
  const SymMatrix v = shape_normalize(v_in, ShapeScale::Determinant);
  const int m = v.dim();
  return StructuredCov(sigma1, -2.0 * sigma1 / m, v).dense();
}

}  // namespace ces

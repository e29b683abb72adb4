#include "ces/families.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>

#include "ces/family_spec.hpp"
#include "ces/special.hpp"
#include "ces/types.hpp"

namespace ces {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogPi = std::log(boost::math::constants::pi<double>());
const double kLog2 = std::log(2.0);

// ---------------------------------------------------------------------------------------
// Raw real kernels in dimension d.

struct Raw {
  FamilyTag f;
  int d;
  double p0;
  double p1;
};

Raw raw_of(const FamilyKernel& k) { return {k.family(), k.real_dim(), k.nu(), k.b()}; }

// Gamma(shape, scale) log density.
double log_gamma_pdf(double x, double shape, double scale) {
  return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale);
}

double k_alpha(const Raw& r) { return r.p0 - 0.5 * r.d; }

double log_g_raw(const Raw& r, double t) {
  const double d = r.d;
  switch (r.f) {
    case FamilyTag::Gaussian:
      return -0.5 * d * (kLog2 + kLogPi) - 0.5 * t;
    case FamilyTag::Student: {
      const double nu = r.p0;
      return std::lgamma(0.5 * (nu + d)) - std::lgamma(0.5 * nu) - 0.5 * d * (std::log(nu) + kLogPi) -
             0.5 * (nu + d) * std::log1p(t / nu);
    }
    case FamilyTag::GeneralizedGaussian: {
      const double s = r.p0;
      const double b = r.p1;
      return std::log(s) + std::lgamma(0.5 * d) - 0.5 * d * (kLog2 + kLogPi) - 0.5 * d / s * std::log(b) -
             std::lgamma(0.5 * d / s) - std::pow(t, s) / (std::pow(2.0, s) * b);
    }
    case FamilyTag::KDist: {
      const double nu = r.p0;
      const double alpha = k_alpha(r);
      const double base = 0.5 * d * std::log(nu) - (nu - 1.0) * kLog2 - 0.5 * d * kLogPi - std::lgamma(nu);
      if (t == 0.0) {
        if (alpha > 0.0) return base + std::lgamma(alpha) + (alpha - 1.0) * kLog2;
        return kInf;
      }
      const double x = std::sqrt(2.0 * nu) * std::sqrt(t);
      return base + alpha * std::log(x) + log_bessel_k(alpha, x);
    }
    case FamilyTag::EpsContaminated: {
      const double eps = r.p0;
      const double a2 = r.p1;
      const double l1 = std::log(eps) - 0.5 * d * std::log(a2) - 0.5 * t / a2;
      const double l2 = std::log1p(-eps) - 0.5 * t;
      const double hi = std::max(l1, l2);
      return -0.5 * d * (kLog2 + kLogPi) + hi + std::log(std::exp(l1 - hi) + std::exp(l2 - hi));
    }
  }
  throw std::logic_error("unknown family");
}

// Posterior weight of the a^2 component of the eps-contaminated mixture.
double eps_weight(const Raw& r, double t) {
  const double eps = r.p0;
  const double a2 = r.p1;
  const double l1 = std::log(eps) - 0.5 * r.d * std::log(a2) - 0.5 * t / a2;
  const double l2 = std::log1p(-eps) - 0.5 * t;
  return 1.0 / (1.0 + std::exp(l2 - l1));
}

double phi_raw(const Raw& r, double t) {
  const double d = r.d;
  switch (r.f) {
    case FamilyTag::Gaussian:
      return 1.0;
    case FamilyTag::Student:
      return (r.p0 + d) / (r.p0 + t);
    case FamilyTag::GeneralizedGaussian: {
      const double s = r.p0;
      if (s == 1.0) return 1.0 / r.p1;
      return 2.0 * s * std::pow(t, s - 1.0) / (std::pow(2.0, s) * r.p1);
    }
    case FamilyTag::KDist: {
      const double nu = r.p0;
      const double alpha = k_alpha(r);
      if (t == 0.0) return alpha > 1.0 ? nu / (alpha - 1.0) : kInf;
      const double x = std::sqrt(2.0 * nu) * std::sqrt(t);
      return 2.0 * nu / x * bessel_k_ratio(alpha, x);
    }
    case FamilyTag::EpsContaminated: {
      const double w = eps_weight(r, t);
      return w / r.p1 + (1.0 - w);
    }
  }
  throw std::logic_error("unknown family");
}

double dphi_raw(const Raw& r, double t) {
  const double d = r.d;
  switch (r.f) {
    case FamilyTag::Gaussian:
      return 0.0;
    case FamilyTag::Student:
      return -(r.p0 + d) / ((r.p0 + t) * (r.p0 + t));
    case FamilyTag::GeneralizedGaussian: {
      const double s = r.p0;
      if (s == 1.0) return 0.0;
      return 2.0 * s * (s - 1.0) * std::pow(t, s - 2.0) / (std::pow(2.0, s) * r.p1);
    }
    case FamilyTag::KDist: {
      const double nu = r.p0;
      const double alpha = k_alpha(r);
      if (t == 0.0) throw std::domain_error("score_phi_derivative: K kernel at t = 0");
      const double x = std::sqrt(2.0 * nu) * std::sqrt(t);
      const double ratio = bessel_k_ratio(alpha, x);
      const double dratio = ratio * ratio + (2.0 * alpha - 1.0) * ratio / x - 1.0;
      const double dphi_dx = 2.0 * nu * (dratio / x - ratio / (x * x));
      return dphi_dx * nu / x;
    }
    case FamilyTag::EpsContaminated: {
      const double w = eps_weight(r, t);
      const double c = 1.0 - 1.0 / r.p1;
      return -0.5 * w * (1.0 - w) * c * c;
    }
  }
  throw std::logic_error("unknown family");
}

double gg_theta(const Raw& r) { return std::pow(2.0, r.p0) * r.p1; }

// E(Q_raw^j) for j = 1, 2.
double raw_moment(const Raw& r, int j) {
  const double d = r.d;
  switch (r.f) {
    case FamilyTag::Gaussian:
      return j == 1 ? d : d * (d + 2.0);
    case FamilyTag::Student: {
      const double nu = r.p0;
      if (j == 1) return nu > 2.0 ? d * nu / (nu - 2.0) : kInf;
      return nu > 4.0 ? nu * nu * d * (d + 2.0) / ((nu - 2.0) * (nu - 4.0)) : kInf;
    }
    case FamilyTag::GeneralizedGaussian: {
      const double s = r.p0;
      const double k = 0.5 * d / s;
      return std::exp(j / s * std::log(gg_theta(r)) + std::lgamma(k + j / s) - std::lgamma(k));
    }
    case FamilyTag::KDist:
      return j == 1 ? d : d * (d + 2.0) * (1.0 + 1.0 / r.p0);
    case FamilyTag::EpsContaminated: {
      const double eps = r.p0;
      const double a2 = r.p1;
      return j == 1 ? d * (eps * a2 + 1.0 - eps) : d * (d + 2.0) * (eps * a2 * a2 + 1.0 - eps);
    }
  }
  throw std::logic_error("unknown family");
}

// Canonical raw texture, x = mu + sqrt(tau) n, n ~ N(0, Sigma).
struct RawTexture {
  TextureLaw::Kind kind;
  double shape;
  double scale;
  double p;
  double a;
  double b;
};

std::optional<RawTexture> raw_texture(const Raw& r) {
  switch (r.f) {
    case FamilyTag::Gaussian:
      return RawTexture{TextureLaw::Kind::Degenerate, 0, 1, 0, 1.0, 1.0};
    case FamilyTag::Student:
      return RawTexture{TextureLaw::Kind::InverseGamma, 0.5 * r.p0, 0.5 * r.p0, 0, 1, 1};
    case FamilyTag::KDist:
      return RawTexture{TextureLaw::Kind::Gamma, r.p0, 1.0 / r.p0, 0, 1, 1};
    case FamilyTag::EpsContaminated:
      return RawTexture{TextureLaw::Kind::TwoPoint, 0, 1, r.p0, r.p1, 1.0};
    case FamilyTag::GeneralizedGaussian:
      if (r.p0 == 1.0) return RawTexture{TextureLaw::Kind::Degenerate, 0, 1, 0, r.p1, r.p1};
      return std::nullopt;
  }
  return std::nullopt;
}

double raw_cdf(const Raw& r, double q) {
  if (q <= 0.0) return 0.0;
  if (std::isinf(q)) return 1.0;
  const double d = r.d;
  using boost::math::gamma_p;
  switch (r.f) {
    case FamilyTag::Gaussian:
      return gamma_p(0.5 * d, 0.5 * q);
    case FamilyTag::Student:
      return boost::math::ibeta(0.5 * d, 0.5 * r.p0, q / (q + r.p0));
    case FamilyTag::GeneralizedGaussian:
      return gamma_p(0.5 * d / r.p0, std::pow(q, r.p0) / gg_theta(r));
    case FamilyTag::KDist: {
      const double nu = r.p0;
      auto f = [&](double tau) {
        if (tau <= 0.0) return 0.0;
        return std::exp(log_gamma_pdf(tau, nu, 1.0 / nu)) * gamma_p(0.5 * d, 0.5 * q / tau);
      };
      QuadConfig cfg;
      cfg.scale = 1.0;
      cfg.rel_tol = 1e-12;
      cfg.breakpoints = {q / d};
      return std::min(1.0, integrate_half_line(f, cfg).value);
    }
    case FamilyTag::EpsContaminated: {
      const double eps = r.p0;
      return eps * gamma_p(0.5 * d, 0.5 * q / r.p1) + (1.0 - eps) * gamma_p(0.5 * d, 0.5 * q);
    }
  }
  throw std::logic_error("unknown family");
}

double raw_sample(const Raw& r, Philox4x32& eng) {
  const double d = r.d;
  boost::random::chi_squared_distribution<double> chi2(d);
  switch (r.f) {
    case FamilyTag::Gaussian:
      return chi2(eng);
    case FamilyTag::Student: {
      boost::random::chi_squared_distribution<double> chi2nu(r.p0);
      const double num = chi2(eng);
      return num * r.p0 / chi2nu(eng);
    }
    case FamilyTag::GeneralizedGaussian: {
      boost::random::gamma_distribution<double> gam(0.5 * d / r.p0, gg_theta(r));
      return std::pow(gam(eng), 1.0 / r.p0);
    }
    case FamilyTag::KDist: {
      boost::random::gamma_distribution<double> gam(r.p0, 1.0 / r.p0);
      const double tau = gam(eng);
      return tau * chi2(eng);
    }
    case FamilyTag::EpsContaminated: {
      const double tau = uniform01(eng) < r.p0 ? r.p1 : 1.0;
      return tau * chi2(eng);
    }
  }
  throw std::logic_error("unknown family");
}

// A rough location of the bulk of Q_raw, used to scale the quadrature map.
double raw_typical(const Raw& r) {
  if (r.f == FamilyTag::GeneralizedGaussian) {
    return std::pow(0.5 * r.d / r.p0 * gg_theta(r), 1.0 / r.p0);
  }
  return r.d;
}

// Q = Q_raw / qfac.
double qfac(const FamilyKernel& k) { return k.lambda() * (k.is_complex() ? 2.0 : 1.0); }

void check_dim(int dim) {
  if (dim < 1) throw std::invalid_argument("FamilyKernel: dimension must be >= 1");
}

}  // namespace

std::string to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::Gaussian: return "gaussian";
    case FamilyTag::Student: return "student";
    case FamilyTag::GeneralizedGaussian: return "gg";
    case FamilyTag::KDist: return "k";
    case FamilyTag::EpsContaminated: return "epscont";
  }
  return "?";
}

std::string to_string(ScaleConvention c) {
  switch (c) {
    case ScaleConvention::Raw: return "raw";
    case ScaleConvention::Covariance: return "cov";
    case ScaleConvention::Median: return "median";
    case ScaleConvention::Custom: return "custom";
  }
  return "?";
}

// ---------------------------------------------------------------------------------------
// FamilyKernel

FamilyKernel::FamilyKernel(FamilyTag f, int dim, Realness r, double p0, double p1)
    : family_(f), dim_(dim), realness_(r), p0_(p0), p1_(p1) {
  check_dim(dim);
}

FamilyKernel FamilyKernel::gaussian(int dim, Realness realness) {
  return FamilyKernel(FamilyTag::Gaussian, dim, realness, 0.0, 0.0);
}

FamilyKernel FamilyKernel::student(int dim, double nu, Realness realness) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("student: nu must be positive and finite");
  return FamilyKernel(FamilyTag::Student, dim, realness, nu, 0.0);
}

FamilyKernel FamilyKernel::generalized_gaussian(int dim, double s, double b, Realness realness) {
  if (!(s > 0.0) || !(b > 0.0)) throw std::invalid_argument("gg: s and b must be positive");
  return FamilyKernel(FamilyTag::GeneralizedGaussian, dim, realness, s, b);
}

FamilyKernel FamilyKernel::generalized_gaussian_cov(int dim, double s, Realness realness) {
  check_dim(dim);
  if (!(s > 0.0)) throw std::invalid_argument("gg: s must be positive");
  const double d = realness == Realness::Real ? dim : 2.0 * dim;
  const double b = std::pow(0.5 * d * std::exp(std::lgamma(0.5 * d / s) - std::lgamma((0.5 * d + 1.0) / s)), s);
  FamilyKernel k(FamilyTag::GeneralizedGaussian, dim, realness, s, b);
  k.convention_ = ScaleConvention::Covariance;
  return k;
}

FamilyKernel FamilyKernel::k_dist(int dim, double nu, Realness realness) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("k: nu must be positive and finite");
  return FamilyKernel(FamilyTag::KDist, dim, realness, nu, 0.0);
}

FamilyKernel FamilyKernel::eps_contaminated(int dim, double eps, double a2, Realness realness) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("epscont: eps must be in (0, 1)");
  if (!(a2 > 0.0)) throw std::invalid_argument("epscont: a2 must be positive");
  return FamilyKernel(FamilyTag::EpsContaminated, dim, realness, eps, a2);
}

bool FamilyKernel::is_compound_gaussian() const {
  return family_ != FamilyTag::GeneralizedGaussian || p0_ == 1.0;
}

FamilyKernel FamilyKernel::with_scale(double lambda, ScaleConvention convention) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("with_scale: lambda must be positive");
  FamilyKernel k = *this;
  k.lambda_ = lambda;
  k.convention_ = convention;
  return k;
}

FamilyKernel FamilyKernel::with_dim(int dim) const {
  FamilyKernel k = *this;
  check_dim(dim);
  k.dim_ = dim;
  // Compound-Gaussian textures do not depend on the dimension, so lambda keeps its meaning.
  if (convention_ != ScaleConvention::Raw) {
    if (!is_compound_gaussian() || convention_ == ScaleConvention::Median) k.convention_ = ScaleConvention::Custom;
  }
  return k;
}

FamilyKernel FamilyKernel::with_realness(Realness realness) const {
  FamilyKernel k = *this;
  k.realness_ = realness;
  return k;
}

FamilyKernel FamilyKernel::as_real_composite() const {
  FamilyKernel k = *this;
  k.dim_ = real_dim();
  k.realness_ = Realness::Real;
  return k;
}

FamilyKernel FamilyKernel::raw() const { return with_scale(1.0, ScaleConvention::Raw); }

std::string FamilyKernel::describe() const {
  std::ostringstream os;
  os << format_family(*this) << " m=" << dim_ << ' '
     << (realness_ == Realness::Real ? "real" : realness_ == Realness::ComplexCircular ? "circular" : "noncircular")
     << " scale=" << to_string(convention_);
  os.precision(15);
  os << " lambda=" << lambda_;
  return os.str();
}

// ---------------------------------------------------------------------------------------
// Generators

double log_density_generator(const FamilyKernel& k, double t) {
  if (!(t >= 0.0)) throw std::domain_error("density_generator: t must be nonnegative");
  const Raw r = raw_of(k);
  const double lam = k.lambda();
  if (!k.is_complex()) return 0.5 * r.d * std::log(lam) + log_g_raw(r, lam * t);
  const double m = k.dim();
  return m * kLog2 + m * std::log(lam) + log_g_raw(r, 2.0 * lam * t);
}

double density_generator(const FamilyKernel& k, double t) { return std::exp(log_density_generator(k, t)); }

double score_phi(const FamilyKernel& k, double t) {
  if (!(t >= 0.0)) throw std::domain_error("score_phi: t must be nonnegative");
  const double lam = k.lambda();
  const double f = k.is_complex() ? 2.0 : 1.0;
  return lam * phi_raw(raw_of(k), f * lam * t);
}

double score_phi_derivative(const FamilyKernel& k, double t) {
  if (!(t >= 0.0)) throw std::domain_error("score_phi_derivative: t must be nonnegative");
  const double lam = k.lambda();
  const double f = k.is_complex() ? 2.0 : 1.0;
  return f * lam * lam * dphi_raw(raw_of(k), f * lam * t);
}

// ---------------------------------------------------------------------------------------
// QLaw

QLaw::QLaw(FamilyKernel kernel) : kernel_(std::move(kernel)) {}

QLaw q_law(const FamilyKernel& k) { return QLaw(k); }

double typical_q(const FamilyKernel& k) { return raw_typical(raw_of(k)) / qfac(k); }

double QLaw::log_pdf(double q) const {
  if (q < 0.0) return -kInf;
  const Raw r = raw_of(kernel_);
  const double c = qfac(kernel_);
  const double x = c * q;
  const double half = 0.5 * r.d;
  if (x == 0.0) {
    if (half > 1.0) return -kInf;
    if (half < 1.0) return kInf;
  }
  const double lx = half == 1.0 ? 0.0 : (half - 1.0) * std::log(x);
  const double lp = half * kLogPi - std::lgamma(half) + lx + log_g_raw(r, x);
  return std::log(c) + lp;
}

double QLaw::pdf(double q) const { return std::exp(log_pdf(q)); }

double QLaw::cdf(double q) const { return raw_cdf(raw_of(kernel_), qfac(kernel_) * q); }

double QLaw::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("QLaw::quantile: p must be in (0, 1)");
  double lo = 0.0;
  double hi = raw_typical(raw_of(kernel_)) / qfac(kernel_);
  for (int i = 0; i < 2000 && cdf(hi) < p; ++i) {
    lo = hi;
    hi *= 2.0;
  }
  if (cdf(hi) < p) throw NumericalError("QLaw::quantile: could not bracket");
  for (int i = 0; i < 400 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double QLaw::mean() const { return raw_moment(raw_of(kernel_), 1) / qfac(kernel_); }

double QLaw::second_moment() const {
  const double c = qfac(kernel_);
  return raw_moment(raw_of(kernel_), 2) / (c * c);
}

double QLaw::sample(Philox4x32& eng) const { return raw_sample(raw_of(kernel_), eng) / qfac(kernel_); }

double QLaw::expect(const std::function<double(double)>& h, const QuadConfig& cfg_in) const {
  QuadConfig cfg = cfg_in;
  const Raw r = raw_of(kernel_);
  const double c = qfac(kernel_);
  cfg.scale = raw_typical(r) / c;
  if (r.f == FamilyTag::EpsContaminated) cfg.breakpoints.push_back(r.d * r.p1 / c);
  auto f = [&](double q) {
    // far tail: the density underflows before h can blow up
    const double w = std::exp(log_pdf(q));
    if (!(w > 0.0)) return 0.0;
    return h(q) * w;
  };
  return integrate_half_line(f, cfg).value;
}

// ---------------------------------------------------------------------------------------
// Kurtosis, textures, xi

double kurtosis(const FamilyKernel& k) {
  const Raw r = raw_of(k);
  const double m1 = raw_moment(r, 1);
  const double m2 = raw_moment(r, 2);
  if (!std::isfinite(m1) || !std::isfinite(m2)) return kInf;
  const double d = r.d;
  return d / (d + 2.0) * m2 / (m1 * m1) - 1.0;
}

std::optional<TextureLaw> texture_law(const FamilyKernel& k, TextureConvention convention) {
  const auto rt = raw_texture(raw_of(k));
  if (!rt) return std::nullopt;
  if (convention == TextureConvention::HalvedK && k.family() != FamilyTag::KDist) {
    throw std::invalid_argument("texture_law: the HalvedK convention applies to the K family only");
  }
  // tau scales like Q: tau = tau_raw / lambda, halved again in the HalvedK convention.
  const double div = k.lambda() * (convention == TextureConvention::HalvedK ? 2.0 : 1.0);
  TextureLaw t;
  t.kind_ = rt->kind;
  t.convention_ = convention;
  t.shape_ = rt->shape;
  t.p_ = rt->p;
  t.a_ = rt->a / div;
  t.b_ = rt->b / div;
  t.scale_ = rt->scale / div;
  return t;
}

double TextureLaw::mean() const {
  switch (kind_) {
    case Kind::Degenerate: return a_;
    case Kind::InverseGamma: return shape_ > 1.0 ? scale_ / (shape_ - 1.0) : kInf;
    case Kind::Gamma: return shape_ * scale_;
    case Kind::TwoPoint: return p_ * a_ + (1.0 - p_) * b_;
  }
  return kInf;
}

double TextureLaw::variance() const {
  switch (kind_) {
    case Kind::Degenerate: return 0.0;
    case Kind::InverseGamma:
      if (shape_ <= 2.0) return kInf;
      return scale_ * scale_ / ((shape_ - 1.0) * (shape_ - 1.0) * (shape_ - 2.0));
    case Kind::Gamma: return shape_ * scale_ * scale_;
    case Kind::TwoPoint: return p_ * (1.0 - p_) * (a_ - b_) * (a_ - b_);
  }
  return kInf;
}

double TextureLaw::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::Degenerate: return t >= a_ ? 1.0 : 0.0;
    case Kind::InverseGamma: return boost::math::gamma_q(shape_, scale_ / t);
    case Kind::Gamma: return boost::math::gamma_p(shape_, t / scale_);
    case Kind::TwoPoint: return (t >= a_ ? p_ : 0.0) + (t >= b_ ? 1.0 - p_ : 0.0);
  }
  return 0.0;
}

double TextureLaw::log_pdf(double t) const {
  if (t <= 0.0) return -kInf;
  switch (kind_) {
    case Kind::InverseGamma:
      return shape_ * std::log(scale_) - std::lgamma(shape_) - (shape_ + 1.0) * std::log(t) - scale_ / t;
    case Kind::Gamma:
      return log_gamma_pdf(t, shape_, scale_);
    default:
      throw std::logic_error("TextureLaw::log_pdf: discrete texture has no density");
  }
}

double TextureLaw::sample(Philox4x32& eng) const {
  switch (kind_) {
    case Kind::Degenerate: return a_;
    case Kind::InverseGamma: {
      boost::random::gamma_distribution<double> gam(shape_, 1.0);
      return scale_ / gam(eng);
    }
    case Kind::Gamma: {
      boost::random::gamma_distribution<double> gam(shape_, scale_);
      return gam(eng);
    }
    case Kind::TwoPoint: return uniform01(eng) < p_ ? a_ : b_;
  }
  return a_;
}

std::vector<std::pair<double, double>> TextureLaw::atoms() const {
  switch (kind_) {
    case Kind::Degenerate: return {{a_, 1.0}};
    case Kind::TwoPoint: return {{a_, p_}, {b_, 1.0 - p_}};
    default: return {};
  }
}

namespace {

XiCoefficients xi_raw_closed(const Raw& r) {
  const double d = r.d;
  switch (r.f) {
    case FamilyTag::Gaussian:
      return {1.0, 1.0};
    case FamilyTag::Student: {
      const double x = (r.p0 + d) / (r.p0 + d + 2.0);
      return {x, x};
    }
    case FamilyTag::GeneralizedGaussian: {
      const double s = r.p0;
      const double k = 0.5 * d / s;
      if (!(k + 2.0 - 1.0 / s > 0.0)) return {kInf, (d + 2.0 * s) / (d + 2.0)};
      const double xi1 = 4.0 * s * s / d *
                         std::exp(-std::log(gg_theta(r)) / s + std::lgamma(k + 2.0 - 1.0 / s) - std::lgamma(k));
      return {xi1, (d + 2.0 * s) / (d + 2.0)};
    }
    default:
      throw std::logic_error("no closed form");
  }
}

}  // namespace

XiCoefficients sb_xi_quadrature(const FamilyKernel& k, const QuadConfig& cfg) {
  const QLaw law(k);
  const double m = k.dim();
  const double e1 = law.expect(
      [&](double q) {
        const double p = score_phi(k, q);
        return q * p * p;
      },
      cfg);
  const double e2 = law.expect(
      [&](double q) {
        const double p = score_phi(k, q);
        return q * q * p * p;
      },
      cfg);
  const double denom2 = k.is_complex() ? m * (m + 1.0) : m * (m + 2.0);
  return {e1 / m, e2 / denom2};
}

XiCoefficients sb_xi(const FamilyKernel& k) {
  const Raw r = raw_of(k);
  if (r.f == FamilyTag::Gaussian || r.f == FamilyTag::Student || r.f == FamilyTag::GeneralizedGaussian) {
    const XiCoefficients x = xi_raw_closed(r);
    return {k.lambda() * x.xi1, x.xi2};
  }
  // K: near 0, phi ~ t^{min(nu - d/2, 0) - 1} (or a log), so E[Q phi^2] diverges for small nu.
  if (r.f == FamilyTag::KDist && !(r.p0 > (r.d == 1 ? 0.75 : 1.0))) {
    const QLaw law(k);
    const double m = k.dim();
    const double e2 = law.expect([&](double q) {
      const double p = score_phi(k, q);
      return q * q * p * p;
    });
    return {std::numeric_limits<double>::infinity(), e2 / (k.is_complex() ? m * (m + 1.0) : m * (m + 2.0))};
  }
  return sb_xi_quadrature(k);
}

// ---------------------------------------------------------------------------------------
// Scale conventions

double covariance_lambda(const FamilyKernel& k) {
  const Raw r = raw_of(k);
  return raw_moment(r, 1) / r.d;
}

double median_lambda(const FamilyKernel& k) {
  return QLaw(k.raw().as_real_composite()).median();
}

FamilyKernel with_convention(const FamilyKernel& k, ScaleConvention c) {
  switch (c) {
    case ScaleConvention::Raw:
      return k.raw();
    case ScaleConvention::Covariance: {
      const double lam = covariance_lambda(k);
      if (!std::isfinite(lam)) {
        throw std::invalid_argument("scale=cov requires a finite second moment: " + format_family(k));
      }
      return k.with_scale(lam, ScaleConvention::Covariance);
    }
    case ScaleConvention::Median:
      return k.with_scale(median_lambda(k), ScaleConvention::Median);
    case ScaleConvention::Custom:
      throw std::invalid_argument("with_convention: Custom needs an explicit lambda");
  }
  return k;
}

FamilyKernel scale_normalize(const FamilyKernel& k) {
  if (std::isfinite(covariance_lambda(k))) return with_convention(k, ScaleConvention::Covariance);
  return with_convention(k, ScaleConvention::Median);
}

}  // namespace ces

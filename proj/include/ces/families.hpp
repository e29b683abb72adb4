#pragma once

// Density-generator families. A FamilyKernel bundles the family parameters, the dimension,
// real/complex flavour and a scale factor lambda: with Q_raw the quadratic form of the
// textbook parameterization, the kernel describes Q = Q_raw / lambda, i.e.
//   g(t) = lambda^{d/2} g_raw(lambda t),  phi(t) = lambda phi_raw(lambda t)
// in real dimension d. Complex kernels of dimension m are tied to the real kernel of
// dimension 2m (the "real composite") through g_c(t) = 2^m g_r(2t) and Q_c = Q_r / 2.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ces/quadrature.hpp"
#include "ces/rng.hpp"

namespace ces {

enum class FamilyTag { Gaussian, Student, GeneralizedGaussian, KDist, EpsContaminated };
enum class Realness { Real, ComplexCircular, ComplexNoncircular };

/// How lambda was chosen.
///   Raw: lambda = 1, textbook parameters.
///   Covariance: E(Q) = m, so cov(x) = Sigma (and E(tau) = 1 for compound-Gaussian kernels).
///   Median: median(Q) = 1, for kernels without a finite second moment.
///   Custom: any other lambda.
enum class ScaleConvention { Raw, Covariance, Median, Custom };

std::string to_string(FamilyTag tag);
std::string to_string(ScaleConvention c);

class FamilyKernel {
 public:
  static FamilyKernel gaussian(int dim, Realness realness = Realness::Real);
  static FamilyKernel student(int dim, double nu, Realness realness = Realness::Real);
  static FamilyKernel generalized_gaussian(int dim, double s, double b, Realness realness = Realness::Real);
  /// GG with b = [d/2 Gamma(d/2s) / Gamma((d/2+1)/s)]^s so that cov(x) = Sigma.
  static FamilyKernel generalized_gaussian_cov(int dim, double s, Realness realness = Realness::Real);
  static FamilyKernel k_dist(int dim, double nu, Realness realness = Realness::Real);
  static FamilyKernel eps_contaminated(int dim, double eps, double a2, Realness realness = Realness::Real);

  FamilyTag family() const { return family_; }
  int dim() const { return dim_; }
  Realness realness() const { return realness_; }
  bool is_complex() const { return realness_ != Realness::Real; }
  /// Dimension of the real vector the kernel lives on: m (real) or 2m (complex).
  int real_dim() const { return is_complex() ? 2 * dim_ : dim_; }

  double nu() const { return p0_; }
  double s() const { return p0_; }
  double b() const { return p1_; }
  double eps() const { return p0_; }
  double a2() const { return p1_; }

  double lambda() const { return lambda_; }
  ScaleConvention convention() const { return convention_; }

  /// True when the kernel is a Gaussian scale mixture (everything except GG with s != 1).
  bool is_compound_gaussian() const;

  FamilyKernel with_scale(double lambda, ScaleConvention convention = ScaleConvention::Custom) const;
  FamilyKernel with_dim(int dim) const;
  FamilyKernel with_realness(Realness realness) const;
  /// Same parameters and lambda, as a real kernel on dimension real_dim().
  FamilyKernel as_real_composite() const;
  /// Same kernel with lambda reset to 1.
  FamilyKernel raw() const;

  /// "student(nu=3) m=2 real scale=cov lambda=3"
  std::string describe() const;

  bool operator==(const FamilyKernel& o) const = default;

 private:
  FamilyKernel(FamilyTag f, int dim, Realness r, double p0, double p1);

  FamilyTag family_;
  int dim_;
  Realness realness_;
  double p0_;
  double p1_;
  double lambda_ = 1.0;
  ScaleConvention convention_ = ScaleConvention::Raw;
};

/// log g(t); complex kernels use g_c(t) = 2^m g_r(2t).
double log_density_generator(const FamilyKernel& k, double t);
double density_generator(const FamilyKernel& k, double t);

/// phi(t) = -2 g'(t)/g(t) for real kernels and -g_c'(t)/g_c(t) for complex ones, so that
/// phi_c(t) = phi_r(2t) and the Gaussian has phi = 1 in both cases.
double score_phi(const FamilyKernel& k, double t);

/// Derivative phi'(t).
double score_phi_derivative(const FamilyKernel& k, double t);

/// Law of the second-order modular variate Q.
class QLaw {
 public:
  explicit QLaw(FamilyKernel kernel);

  const FamilyKernel& kernel() const { return kernel_; }

  double log_pdf(double q) const;
  double pdf(double q) const;
  double cdf(double q) const;
  double quantile(double p) const;
  double median() const { return quantile(0.5); }
  /// E(Q) and E(Q^2); infinite when the moment does not exist.
  double mean() const;
  double second_moment() const;
  double sample(Philox4x32& eng) const;

  /// E[h(Q)] by quadrature against pdf(q).
  double expect(const std::function<double(double)>& h, const QuadConfig& cfg = {}) const;

 private:
  FamilyKernel kernel_;
};

QLaw q_law(const FamilyKernel& k);

/// Rough location of the bulk of Q, used to scale quadrature maps.
double typical_q(const FamilyKernel& k);

/// Kurtosis parameter kappa = d/(d+2) E(Q^2)/E(Q)^2 - 1 (scale free); +inf if undefined.
double kurtosis(const FamilyKernel& k);

/// Which normalization of the texture to report. Canonical: x = mu + sqrt(tau) n with n
/// real N(0, Sigma) (or CN(0, Sigma)) and Q = Q_raw / lambda. HalvedK: the K texture halved,
/// Gamma(nu, 1/(2 nu)) with E(tau) = 1/2 in raw scale.
enum class TextureConvention { Canonical, HalvedK };

class TextureLaw {
 public:
  enum class Kind { Degenerate, InverseGamma, Gamma, TwoPoint };

  Kind kind() const { return kind_; }
  TextureConvention convention() const { return convention_; }
  double mean() const;
  double variance() const;
  double cdf(double t) const;
  /// Density for continuous kinds; throws for the discrete ones.
  double log_pdf(double t) const;
  double sample(Philox4x32& eng) const;
  /// Atoms (value, probability) for the discrete kinds.
  std::vector<std::pair<double, double>> atoms() const;

 private:
  friend std::optional<TextureLaw> texture_law(const FamilyKernel&, TextureConvention);
  Kind kind_ = Kind::Degenerate;
  TextureConvention convention_ = TextureConvention::Canonical;
  // InverseGamma(shape, scale), Gamma(shape, scale), TwoPoint(p of atom a, a, b), Degenerate(a).
  double shape_ = 0.0;
  double scale_ = 1.0;
  double p_ = 0.0;
  double a_ = 1.0;
  double b_ = 1.0;
};

/// Texture law of a compound-Gaussian kernel; absent for GG with s != 1. Complex kernels
/// share the texture of their real composite.
std::optional<TextureLaw> texture_law(const FamilyKernel& k,
                                      TextureConvention convention = TextureConvention::Canonical);

struct XiCoefficients {
  double xi1;
  double xi2;
};

/// xi1 = E[Q phi^2(Q)]/m, xi2 = E[Q^2 phi^2(Q)]/(m(m+2)) for real kernels; the complex
/// versions use m(m+1). Closed form for Gaussian, Student and GG, quadrature otherwise.
XiCoefficients sb_xi(const FamilyKernel& k);

/// Always by quadrature against the QLaw density (no closed form shortcut).
XiCoefficients sb_xi_quadrature(const FamilyKernel& k, const QuadConfig& cfg = {});

/// Lambda for which E(Q) = m; +inf if E(Q_raw) is infinite.
double covariance_lambda(const FamilyKernel& k);
/// Lambda for which median(Q) = 1.
double median_lambda(const FamilyKernel& k);

/// Covariance convention when E(Q) is finite, the median rule otherwise. Idempotent.
FamilyKernel scale_normalize(const FamilyKernel& k);

/// Apply a named convention; Covariance throws if the second moment is infinite.
FamilyKernel with_convention(const FamilyKernel& k, ScaleConvention c);

}  // namespace ces

#include "ces/density.hpp"

#include <cmath>
#include <limits>

#include <boost/math/constants/constants.hpp>

#include "ces/matrix_kit.hpp"
#include "ces/sampler.hpp"

namespace ces {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLog2Pi = std::log(2.0 * boost::math::constants::pi<double>());

// Golden-section maximization of a unimodal function on [lo, hi].
double argmax_unimodal(const std::function<double(double)>& f, double lo, double hi) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 200 && b - a > 1e-10; ++i) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    }
  }
  return 0.5 * (a + b);
}

double log_mixture(int d, double t, const TextureLaw& tex, const QuadConfig& cfg_in) {
  const auto atoms = tex.atoms();
  if (!atoms.empty()) {
    double hi = -kInf;
    std::vector<double> terms;
    for (const auto& [tau, p] : atoms) {
      if (p <= 0.0) continue;
      const double l = std::log(p) - 0.5 * d * (kLog2Pi + std::log(tau)) - 0.5 * t / tau;
      terms.push_back(l);
      hi = std::max(hi, l);
    }
    double s = 0.0;
    for (double l : terms) s += std::exp(l - hi);
    return hi + std::log(s);
  }
  auto h = [&](double tau) { return -0.5 * d * (kLog2Pi + std::log(tau)) - 0.5 * t / tau + tex.log_pdf(tau); };
  // peak of the integrand in log tau, which stays interior even when h itself peaks at 0
  const double peak = std::exp(argmax_unimodal([&](double lt) { return h(std::exp(lt)) + lt; }, -60.0, 60.0));
  const double hmax = h(peak);
  QuadConfig cfg = cfg_in;
  cfg.scale = peak;
  cfg.breakpoints.push_back(peak);
  auto f = [&](double tau) {
    if (tau <= 0.0) return 0.0;
    return std::exp(h(tau) - hmax);
  };
  return hmax + std::log(integrate_half_line(f, cfg).value);
}

}  // namespace

LogDensityValue make_log_density(double log_pdf) { return {log_pdf, std::exp(log_pdf)}; }

LogDensityValue pdf_res(const DistributionSpec& spec, const Vector& x) {
  if (x.size() != spec.dim()) throw std::invalid_argument("pdf_res: dimension mismatch");
  const double q = mahalanobis(x, spec.mu, spec.sigma);
  return make_log_density(-0.5 * log_det_spd(spec.sigma) + log_density_generator(spec.kernel, q));
}

LogDensityValue pdf_complex(const ComplexSpec& spec, const CVector& x) {
  const int m = spec.dim();
  if (x.size() != m) throw std::invalid_argument("pdf_complex: dimension mismatch");
  const CMatrix ext = spec.extended_scatter();
  Eigen::LLT<CMatrix> llt(ext);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("pdf_complex: extended scatter is not positive definite");
  CVector r(2 * m);
  r << x - spec.mu, (x - spec.mu).conjugate();
  const CVector z = llt.matrixL().solve(r);
  const double q = 0.5 * z.squaredNorm();
  double log_det = 0.0;
  for (int i = 0; i < 2 * m; ++i) log_det += 2.0 * std::log(llt.matrixLLT()(i, i).real());
  return make_log_density(-0.5 * log_det + log_density_generator(spec.kernel, q));
}

double pdf_q(const FamilyKernel& k, double q) { return QLaw(k).pdf(q); }

double pdf_r(const FamilyKernel& k, double r) {
  if (r < 0.0) return 0.0;
  const double lq = QLaw(k).log_pdf(r * r);
  if (r == 0.0) {
    // p_R(r) = 2 r^{d-1} g(r^2) / delta_d, and delta_1 = 1
    return k.real_dim() == 1 ? 2.0 * density_generator(k, 0.0) : 0.0;
  }
  return std::exp(std::log(2.0 * r) + lq);
}

double marginal_generator(const FamilyKernel& k, int m1, double u, const QuadConfig& cfg_in) {
  if (k.is_complex()) throw std::invalid_argument("marginal_generator: real kernels only");
  const int m = k.dim();
  if (m1 < 1 || m1 >= m) throw std::invalid_argument("marginal_generator: need 1 <= m1 < m");
  if (!(u >= 0.0)) throw std::domain_error("marginal_generator: u must be nonnegative");
  const double h = 0.5 * (m - m1);
  const double typ = std::max(typical_q(k), 1e-300);
  const double phi = score_phi(k, u);
  QuadConfig cfg = cfg_in;
  // g(u + s) / g(u) decays like exp(-phi(u) s / 2)
  cfg.scale = std::isfinite(phi) && phi > 0.0 ? 1.0 / (1.0 / typ + 0.5 * phi) : typ;
  // reference level for the integrand; g may be infinite at u = 0
  double lg0 = log_density_generator(k, u);
  if (lg0 == kInf) lg0 = log_density_generator(k, u + cfg.scale);
  if (lg0 == -kInf) return 0.0;
  const double log_norm = h * std::log(boost::math::constants::pi<double>()) - std::lgamma(h);
  // the integral is at most ~ Gamma(h) scale^h, so the result underflows anyway and
  // log g(u + s) - log g(u) would be rounding noise
  if (log_norm + lg0 + std::lgamma(h) + h * std::log(std::max(cfg.scale, 1.0)) < -800.0) return 0.0;
  auto f = [&](double s) {
    if (s <= 0.0) return 0.0;
    return std::exp((h - 1.0) * std::log(s) + log_density_generator(k, u + s) - lg0);
  };
  const double integral = integrate_half_line(f, cfg).value;
  return std::exp(log_norm + lg0 + std::log(integral));
}

ConditionalParams conditional_params(const DistributionSpec& spec, int split, const Vector& x1) {
  if (x1.size() != split) throw std::invalid_argument("conditional_params: x1 has the wrong length");
  const SchurBlocks blocks = schur_conditional(spec.sigma, split);
  const int m2 = spec.dim() - split;
  Eigen::LLT<Matrix> llt(blocks.s11);
  const Vector mu2 = spec.mu.tail(m2) + blocks.s21 * llt.solve(x1 - spec.mu.head(split));
  return {mu2, blocks.s2given1};
}

LogDensityValue pdf_conditional_cg(const DistributionSpec& spec, int split, const Vector& x) {
  if (!spec.kernel.is_compound_gaussian()) {
    throw std::invalid_argument("pdf_conditional_cg: kernel is not compound Gaussian: " + spec.kernel.describe());
  }
  const int m = spec.dim();
  if (split < 1 || split >= m) throw std::invalid_argument("pdf_conditional_cg: split must be in [1, m)");
  Matrix sel = Matrix::Zero(split, m);
  sel.leftCols(split).setIdentity();
  const DistributionSpec marg = affine_spec(spec, sel, Vector::Zero(split));
  return make_log_density(pdf_res(spec, x).log_pdf - pdf_res(marg, x.head(split)).log_pdf);
}

double log_cg_mixture_generator(const FamilyKernel& k, double t, const QuadConfig& cfg) {
  const auto tex = texture_law(k);
  if (!tex) throw std::invalid_argument("cg mixture: kernel has no texture: " + k.describe());
  if (k.is_complex()) {
    const int m = k.dim();
    return m * std::log(2.0) + log_mixture(2 * m, 2.0 * t, *tex, cfg);
  }
  return log_mixture(k.dim(), t, *tex, cfg);
}

LogDensityValue pdf_cg_mixture(const DistributionSpec& spec, const Vector& x, const QuadConfig& cfg) {
  if (x.size() != spec.dim()) throw std::invalid_argument("pdf_cg_mixture: dimension mismatch");
  const double q = mahalanobis(x, spec.mu, spec.sigma);
  return make_log_density(-0.5 * log_det_spd(spec.sigma) + log_cg_mixture_generator(spec.kernel, q, cfg));
}

}  // namespace ces

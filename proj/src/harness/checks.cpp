#include "ces/harness/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ces/asymptotic.hpp"
#include "ces/density.hpp"
#include "ces/family_spec.hpp"
#include "ces/harness/stats.hpp"
#include "ces/kernels.hpp"
#include "ces/matrix_kit.hpp"
#include "ces/sampler.hpp"
#include "ces/slepian_bangs.hpp"

namespace ces::harness {

using nlohmann::json;

Matrix default_sigma(int m) {
  Matrix s(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) s(i, j) = std::pow(0.5, std::abs(i - j)) * std::sqrt((1.0 + i) * (1.0 + j));
  return s;
}

double kurtosis_closed_form(const FamilyKernel& k) {
  switch (k.family()) {
    case FamilyTag::Gaussian:
      return 0.0;
    case FamilyTag::Student:
      return k.nu() > 4.0 ? 2.0 / (k.nu() - 4.0) : INFINITY;
    case FamilyTag::KDist:
      return 1.0 / k.nu();
    case FamilyTag::EpsContaminated: {
      const double e1 = k.eps() * k.a2() + 1.0 - k.eps();
      const double e2 = k.eps() * k.a2() * k.a2() + 1.0 - k.eps();
      return e2 / (e1 * e1) - 1.0;
    }
    case FamilyTag::GeneralizedGaussian: {
      const double d = k.real_dim();
      const double s = k.s();
      const double a = d / (2.0 * s);
      return d / (d + 2.0) * std::tgamma(a + 2.0 / s) * std::tgamma(a) / std::pow(std::tgamma(a + 1.0 / s), 2) - 1.0;
    }
  }
  return INFINITY;
}

namespace {

const json& params(const CheckContext& c) { return c.check.params; }

template <class T>
T param(const CheckContext& c, const char* key, T def) {
  return params(c).contains(key) ? params(c).at(key).get<T>() : def;
}

int n_param(const CheckContext& c, int def) {
  if (params(c).contains("n")) return params(c).at("n").get<int>();
  if (!c.plan.n_grid.empty()) return c.plan.n_grid.front();
  return def;
}

int reps_param(const CheckContext& c, int def) {
  if (params(c).contains("replicates")) return params(c).at("replicates").get<int>();
  if (c.plan.replicates) return *c.plan.replicates;
  return def;
}

double threshold(const CheckContext& c, double def) { return param(c, "threshold", def); }

Matrix matrix_from_json(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != static_cast<std::size_t>(m.cols())) throw std::invalid_argument("ragged matrix in plan");
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

Vector vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), v.size());
}

DistributionSpec make_spec(const std::string& family, int m, const json& p) {
  const FamilyKernel k = parse_family(family, m);
  const Vector mu = p.contains("mu") ? vector_from_json(p.at("mu")) : Vector(Vector::Zero(m));
  const Matrix sigma = p.contains("sigma") ? matrix_from_json(p.at("sigma")) : default_sigma(m);
  return DistributionSpec(k, mu, SymMatrix(sigma));
}

DistributionSpec spec_param(const CheckContext& c, const std::string& def_family, int def_m) {
  const json& p = params(c);
  if (!p.contains("family") && c.plan.spec && !p.contains("m")) return *c.plan.spec;
  const int m = p.value("m", c.plan.spec ? c.plan.spec->dim() : def_m);
  const std::string fam = p.value("family", c.plan.spec ? format_family(c.plan.spec->kernel) : def_family);
  return make_spec(fam, m, p);
}

Vector true_q(const DataMatrix& data, const DistributionSpec& spec) {
  return kernels::mahalanobis_batch(data, spec.mu, cholesky_sqrt(spec.sigma));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------------------

CheckOutcome q_law_ks(const CheckContext& c) {
  const DistributionSpec spec = spec_param(c, "gaussian", 2);
  const int n = n_param(c, 10000);
  const double level = param(c, "level", 0.01);
  const FamilyKernel& k = spec.kernel;
  const double lam = k.lambda();
  const double m = k.dim();
  std::function<double(double)> cdf;
  std::string ref;
  switch (k.family()) {
    case FamilyTag::Gaussian: {
      const boost::math::chi_squared law(m);
      cdf = [law, lam](double q) { return boost::math::cdf(law, lam * q); };
      ref = "chi2";
      break;
    }
    case FamilyTag::Student: {
      const boost::math::fisher_f law(m, k.nu());
      cdf = [law, lam, m](double q) { return boost::math::cdf(law, lam * q / m); };
      ref = "F";
      break;
    }
    case FamilyTag::GeneralizedGaussian: {
      const double s = k.s();
      const boost::math::gamma_distribution<> law(m / (2.0 * s), std::pow(2.0, s) * k.b());
      cdf = [law, lam, s](double q) { return boost::math::cdf(law, std::pow(lam * q, s)); };
      ref = "Gamma";
      break;
    }
    default: {
      const QLaw law(k);
      cdf = [law](double q) { return law.cdf(q); };
      ref = "QLaw";
    }
  }
  const SampleBatch b = sample_res(spec, n, c.plan.seed, c.stream_base);
  const Vector q = true_q(b.data, spec);
  const KsResult r = ks_test(std::vector<double>(q.data(), q.data() + q.size()), cdf);
  return {r.statistic, ks_critical_value(n, level),
          ref + " reference, n=" + std::to_string(n) + ", p=" + fmt(r.p_value), {}};
}

CheckOutcome kurtosis_check(const CheckContext& c) {
  const DistributionSpec spec = spec_param(c, "student(nu=10)", 3);
  const int n = n_param(c, 1000000);
  const double expected = kurtosis_closed_form(spec.kernel);
  if (!std::isfinite(expected)) throw std::invalid_argument("kurtosis check: kappa is infinite for this family");
  const SampleBatch b = sample_res(spec, n, c.plan.seed, c.stream_base);
  const MeanSe est = kurtosis_from_q(true_q(b.data, spec), spec.dim());
  return {std::abs(est.mean - expected) / est.se, threshold(c, 5.0),
          "kappa_hat=" + fmt(est.mean) + " se=" + fmt(est.se) + " closed form=" + fmt(expected), {}};
}

CheckOutcome tyler_residual_check(const CheckContext& c) {
  const DistributionSpec spec = spec_param(c, "student(nu=2)", 3);
  const int n = n_param(c, 2000);
  const SampleBatch b = sample_res(spec, n, c.plan.seed, c.stream_base);
  FitConfig cfg = known_mu_config(spec.mu, param(c, "tol", 1e-10), param(c, "max_iter", 200));
  const EstimateResult r = fit_tyler(b.data, cfg);
  const double res = tyler_residual(b.data, spec.mu, r.sigma_hat);
  return {res, threshold(c, 1e-10),
          "iterations=" + std::to_string(r.iterations) + (r.converged ? " converged" : " not converged"), {}};
}

CheckOutcome tyler_invariance_check(const CheckContext& c) {
  const DistributionSpec spec = spec_param(c, "student(nu=2)", 3);
  const int n = n_param(c, 2000);
  const SampleBatch b = sample_res(spec, n, c.plan.seed, c.stream_base);
  Philox4x32 eng(c.plan.seed, c.stream_base + 1);
  DataMatrix scaled = b.data;
  for (Eigen::Index i = 0; i < scaled.rows(); ++i) {
    const double f = std::pow(10.0, 4.0 * uniform01(eng) - 2.0);
    scaled.row(i) = spec.mu.transpose() + f * (b.data.row(i) - spec.mu.transpose());
  }
  const FitConfig cfg = known_mu_config(spec.mu, param(c, "tol", 1e-12), param(c, "max_iter", 1000));
  const EstimateResult r1 = fit_tyler(b.data, cfg);
  const EstimateResult r2 = fit_tyler(scaled, cfg);
  const double diff = (r1.sigma_hat.matrix() - r2.sigma_hat.matrix()).norm();
  return {diff, threshold(c, 1e-10),
          "iterations " + std::to_string(r1.iterations) + " / " + std::to_string(r2.iterations), {}};
}

CheckOutcome ml_gaussian_check(const CheckContext& c) {
  const DistributionSpec spec = spec_param(c, "gaussian", 3);
  const int n = n_param(c, 1000);
  const SampleBatch b = sample_res(spec, n, c.plan.seed, c.stream_base);
  const int m = spec.dim();
  Vector mean = Vector::Zero(m);
  for (int i = 0; i < n; ++i) mean += b.data.row(i).transpose();
  mean /= n;
  Matrix s = Matrix::Zero(m, m);
  for (int i = 0; i < n; ++i) {
    const Vector r = b.data.row(i).transpose() - mean;
    s += r * r.transpose();
  }
  s /= n;
  const EstimateResult r = fit_ml(b.data, spec.kernel.with_scale(1.0, ScaleConvention::Raw));
  const double emu = (r.mu_hat - mean).cwiseAbs().maxCoeff() / (1.0 + mean.cwiseAbs().maxCoeff());
  const double esig = (r.sigma_hat.matrix() - s).cwiseAbs().maxCoeff() / s.cwiseAbs().maxCoeff();
  return {nan_max(emu, esig), threshold(c, 1e-12),
          "iterations=" + std::to_string(r.iterations) + " mu err=" + fmt(emu) + " Sigma err=" + fmt(esig), {}};
}

// Fits one replicate and returns the matrix whose vec is compared.
Matrix fit_replicate(const std::string& est, const DataMatrix& data, const DistributionSpec& spec, const json& p) {
  if (est == "scm") return sample_moments(data).sigma_hat.matrix();
  if (est == "ml") return fit_ml(data, spec.kernel).sigma_hat.matrix();
  if (est == "tyler") {
    const EstimateResult r = fit_tyler(data, known_mu_config(spec.mu));
    if (p.value("normalize", std::string("det")) == "trace") return r.sigma_hat.matrix();
    return shape_normalize(r.sigma_hat, ShapeScale::Determinant).matrix();
  }
  if (est == "m") {
    const WeightFunction u2 = weights::huber(spec.dim(), p.value("huber_q", 0.9));
    const FitConfig cfg = known_mu_config(spec.mu);
    return fit_maronna(data, weights::location_from_scatter(u2), u2, cfg).sigma_hat.matrix();
  }
  throw std::invalid_argument("asymptotic-cov: unknown estimator '" + est + "'");
}

Matrix asymptotic_target(const std::string& est, const DistributionSpec& spec, const json& p) {
  if (est == "scm") return scm_asymptotics(spec.kernel, spec.sigma).dense();
  if (est == "ml") return ml_asymptotics(spec.kernel, spec.sigma).dense();
  if (est == "tyler") {
    const EstimatorAsymptotics a = tyler_asymptotics(spec.dim(), spec.sigma);
    const ShapeScale s = p.value("normalize", std::string("det")) == "trace" ? ShapeScale::Trace : ShapeScale::Determinant;
    if (s == ShapeScale::Trace) return shape_asymptotics(a, s, spec.sigma);
    return StructuredCov(a.r_sigma.sigma1(), a.r_sigma.sigma2(), shape_normalize(spec.sigma, s)).dense();
  }
  if (est == "m") {
    const WeightFunction u2 = weights::huber(spec.dim(), p.value("huber_q", 0.9));
    return m_asymptotics(spec.kernel, weights::location_from_scatter(u2), u2, spec.sigma).dense();
  }
  throw std::invalid_argument("asymptotic-cov: unknown estimator '" + est + "'");
}

CheckOutcome asymptotic_cov_check(const CheckContext& c) {
  const DistributionSpec spec = spec_param(c, "gaussian", 2);
  const int n = n_param(c, 10000);
  const int reps = reps_param(c, 2000);
  std::string est = c.plan.estimators.empty() ? "scm" : to_string(c.plan.estimators.front().method);
  est = param(c, "estimator", est);
  const json& p = params(c);

  std::vector<Matrix> estimates(reps);
  std::vector<std::string> errors(reps);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < reps; ++r) {
    try {
      const SampleBatch b = sample_res(spec, n, c.plan.seed, c.stream_base + r);
      estimates[r] = fit_replicate(est, b.data, spec, p);
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  }
  for (int r = 0; r < reps; ++r)
    if (!errors[r].empty()) throw std::runtime_error("replicate " + std::to_string(r) + ": " + errors[r]);

  const Matrix emp = empirical_cov_of_vec(estimates, n);
  const Matrix target = asymptotic_target(est, spec, p);
  return {max_relative_entry_error(emp, target), threshold(c, 0.10),
          est + " on " + spec.kernel.describe() + ", n=" + std::to_string(n) + ", reps=" + std::to_string(reps),
          {{"empirical", emp}, {"formula", target}}};
}

CheckOutcome crb_gaussian_location_check(const CheckContext& c) {
  const DistributionSpec spec = spec_param(c, "gaussian", 3);
  const int n = n_param(c, 100);
  const ParametricModel model = builtin_model("location-vector", spec.mu, spec.sigma.matrix());
  const Matrix bound = crb(model, spec.mu, spec.kernel, n);
  const Matrix expected = spec.sigma.matrix() / static_cast<double>(n);
  const SbCoefficients a = sb_coefficients(spec.kernel);
  const double ea = nan_max({std::abs(a.a0 - 1.0), std::abs(a.a1 - 0.5), std::abs(a.a2)});
  const double em = (bound - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff();
  return {nan_max(ea, em), threshold(c, 1e-12),
          "(a0,a1,a2)=(" + fmt(a.a0) + "," + fmt(a.a1) + "," + fmt(a.a2) + ")", {{"crb", bound}}};
}

CheckOutcome crb_efficiency_check(const CheckContext& c) {
  DistributionSpec base = spec_param(c, "student(nu=6)", 2);
  const double alpha0 = param(c, "alpha", 0.5);
  const int m = base.dim();
  const DistributionSpec spec(base.kernel, Vector::Constant(m, alpha0), base.sigma);
  const int n = n_param(c, 10000);
  const int reps = reps_param(c, 2000);
  const ParametricModel model = builtin_model("location-scalar", spec.mu, spec.sigma.matrix());
  const double bound = crb(model, Vector::Constant(1, alpha0), spec.kernel, n)(0, 0);

  const Matrix si = spd_inverse(spec.sigma);
  const Vector w1 = si * Vector::Ones(m);
  const double denom1 = w1.sum();
  const Matrix l = cholesky_sqrt(spec.sigma);
  std::vector<double> est(reps);
  std::vector<std::string> errors(reps);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < reps; ++r) {
    try {
      const SampleBatch b = sample_res(spec, n, c.plan.seed, c.stream_base + r);
      const Vector proj = b.data * w1;
      double a = proj.mean() / denom1;
      for (int it = 0; it < 500; ++it) {
        const Vector q = kernels::serial::mahalanobis_batch(b.data, Vector::Constant(m, a), l);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
          const double w = score_phi(spec.kernel, q(i));
          num += w * proj(i);
          den += w * denom1;
        }
        const double next = num / den;
        const bool done = std::abs(next - a) < 1e-13 * (1.0 + std::abs(a));
        a = next;
        if (done) break;
      }
      est[r] = a;
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  }
  for (int r = 0; r < reps; ++r)
    if (!errors[r].empty()) throw std::runtime_error("replicate " + std::to_string(r) + ": " + errors[r]);
  double mean = 0.0;
  for (double v : est) mean += v;
  mean /= reps;
  double var = 0.0;
  for (double v : est) var += (v - mean) * (v - mean);
  var /= reps - 1.0;
  return {std::abs(var / bound - 1.0), threshold(c, 0.10), "MC var=" + fmt(var) + " CRB=" + fmt(bound), {}};
}

// Closed forms of (xi1, xi2).
XiCoefficients xi_closed_form(const FamilyKernel& k) {
  const double lam = k.lambda();
  if (k.is_complex()) {
    const double m = k.dim();
    if (k.family() == FamilyTag::Gaussian) return {lam, 1.0};
    if (k.convention() != ScaleConvention::Covariance)
      throw std::invalid_argument("xi-closed-form: complex closed forms need scale=cov");
    if (k.family() == FamilyTag::Student) {
      const double h = k.nu() / 2.0;
      return {h / (h - 1.0) * (h + m) / (h + m + 1.0), (h + m) / (h + m + 1.0)};
    }
    if (k.family() == FamilyTag::GeneralizedGaussian) {
      const double s = k.s();
      return {std::tgamma(2.0 + (m - 1.0) / s) * std::tgamma((m + 1.0) / s) / std::pow(std::tgamma(1.0 + m / s), 2),
              (m + s) / (m + 1.0)};
    }
  } else {
    const double d = k.dim();
    if (k.family() == FamilyTag::Gaussian) return {lam, 1.0};
    if (k.family() == FamilyTag::Student) {
      const double v = (k.nu() + d) / (k.nu() + d + 2.0);
      return {lam * v, v};
    }
    if (k.family() == FamilyTag::GeneralizedGaussian) {
      const double s = k.s();
      const double theta = std::pow(2.0, s) * k.b();
      const double a = d / (2.0 * s);
      const double x1 = 4.0 * s * s / d * std::pow(theta, -1.0 / s) * std::exp(std::lgamma(a + 2.0 - 1.0 / s) - std::lgamma(a));
      return {lam * x1, (d + 2.0 * s) / (d + 2.0)};
    }
  }
  throw std::invalid_argument("xi-closed-form: no closed form for " + k.describe());
}

Realness realness_param(const CheckContext& c) {
  const std::string r = param(c, "realness", std::string("real"));
  if (r == "real") return Realness::Real;
  if (r == "complex" || r == "circular") return Realness::ComplexCircular;
  if (r == "noncircular") return Realness::ComplexNoncircular;
  throw std::invalid_argument("unknown realness '" + r + "'");
}

CheckOutcome xi_closed_form_check(const CheckContext& c) {
  const FamilyKernel k = parse_family(param(c, "family", std::string("student(nu=6)")), param(c, "m", 2),
                                      realness_param(c));
  const XiCoefficients q = sb_xi_quadrature(k);
  const XiCoefficients f = xi_closed_form(k);
  const double e = nan_max(std::abs(q.xi1 - f.xi1) / std::abs(f.xi1), std::abs(q.xi2 - f.xi2) / std::abs(f.xi2));
  return {e, threshold(c, 1e-6),
          k.describe() + ": quadrature (" + fmt(q.xi1) + ", " + fmt(q.xi2) + ") closed (" + fmt(f.xi1) + ", " +
              fmt(f.xi2) + ")",
          {}};
}

CheckOutcome xi_bridge_check(const CheckContext& c) {
  const FamilyKernel k = parse_family(param(c, "family", std::string("student(nu=6)")), param(c, "m", 2),
                                      Realness::ComplexCircular);
  const XiCoefficients xc = sb_xi_quadrature(k);
  const XiCoefficients xr = sb_xi_quadrature(k.as_real_composite());
  const double e = nan_max(std::abs(xc.xi1 - xr.xi1) / std::abs(xr.xi1), std::abs(xc.xi2 - xr.xi2) / std::abs(xr.xi2));
  return {e, threshold(c, 1e-8), k.describe() + " vs real m=" + std::to_string(k.real_dim()), {}};
}

std::vector<std::string> families_param(const CheckContext& c, std::vector<std::string> def) {
  if (params(c).contains("families")) return params(c).at("families").get<std::vector<std::string>>();
  if (params(c).contains("family")) return {params(c).at("family").get<std::string>()};
  return def;
}

CheckOutcome pdf_scale_check(const CheckContext& c) {
  const int m = param(c, "m", 3);
  const auto fams = families_param(c, {"gaussian", "student(nu=3)", "gg(s=0.5,b=1)", "k(nu=1.5)", "epscont(eps=0.1,a2=9)"});
  const auto factors = param(c, "factors", std::vector<double>{0.5, 3.0, 10.0});
  double worst = 0.0;
  std::uint64_t stream = c.stream_base;
  for (const auto& f : fams) {
    const DistributionSpec spec = make_spec(f, m, params(c));
    const SampleBatch b = sample_res(spec, 20, c.plan.seed, stream++);
    for (double a : factors) {
      const DistributionSpec scaled(spec.kernel.with_scale(spec.kernel.lambda() * a), spec.mu,
                                    SymMatrix(a * spec.sigma.matrix()));
      for (Eigen::Index i = 0; i < b.data.rows(); ++i) {
        const Vector x = b.data.row(i).transpose();
        worst = nan_max(worst, std::abs(pdf_res(spec, x).log_pdf - pdf_res(scaled, x).log_pdf));
      }
    }
  }
  return {worst, threshold(c, 1e-12), std::to_string(fams.size()) + " families, max |log pdf difference|", {}};
}

CheckOutcome sigma2_bound_check(const CheckContext& c) {
  const int m = param(c, "m", 3);
  const SymMatrix sigma(default_sigma(m));
  std::vector<EstimatorAsymptotics> list;
  list.push_back(scm_asymptotics(parse_family("student(nu=10)", m), sigma));
  list.push_back(scm_asymptotics(parse_family("k(nu=2)", m), sigma));
  list.push_back(ml_asymptotics(parse_family("student(nu=6)", m), sigma));
  list.push_back(ml_asymptotics(parse_family("gg(s=0.5,b=cov)", m), sigma));
  list.push_back(ml_asymptotics(parse_family("gg(s=2,b=cov)", m), sigma));
  const WeightFunction hub = weights::huber(m);
  list.push_back(m_asymptotics(parse_family("gaussian", m), weights::location_from_scatter(hub), hub, sigma));
  list.push_back(m_asymptotics(parse_family("student(nu=5)", m), weights::location_from_scatter(hub), hub, sigma));
  const EstimatorAsymptotics ty = tyler_asymptotics(m, sigma);
  double worst = 0.0;
  std::ostringstream os;
  for (const auto& a : list) {
    worst = nan_max(worst, nan_max(0.0, -a.bound_gap()) / a.r_sigma.sigma1());
    os << a.estimator << " gap=" << fmt(a.bound_gap()) << "; ";
  }
  worst = nan_max(worst, std::abs(ty.bound_gap()) / ty.r_sigma.sigma1());
  os << "tyler gap=" << fmt(ty.bound_gap());
  return {worst, threshold(c, 1e-12), os.str(), {}};
}

CheckOutcome fourth_moment_check(const CheckContext& c) {
  const DistributionSpec spec = spec_param(c, "student(nu=10)", 3);
  const int n = n_param(c, 1000000);
  const double kappa = kurtosis_closed_form(spec.kernel);
  const SampleBatch b = sample_res(spec, n, c.plan.seed, c.stream_base);
  const DataMatrix centered = b.data.rowwise() - spec.mu.transpose();
  const Matrix cov = QLaw(spec.kernel).mean() / spec.dim() * spec.sigma.matrix();
  const FourthMomentResult r = fourth_moment_identity(centered, cov, kappa);
  return {r.max_z, threshold(c, 5.0), std::to_string(r.quadruples) + " index quadruples, kappa=" + fmt(kappa), {}};
}

CheckOutcome marginal_generator_check(const CheckContext& c) {
  const int m = param(c, "m", 4);
  const int m1 = param(c, "m1", 2);
  const auto fams = families_param(c, {"gaussian", "student(nu=5)", "k(nu=2)", "epscont(eps=0.2,a2=4)"});
  const auto grid = param(c, "u", std::vector<double>{0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0});
  double worst = 0.0;
  for (const auto& f : fams) {
    const FamilyKernel k = parse_family(f, m);
    const FamilyKernel low = k.with_dim(m1);
    for (double u : grid) {
      const double marg = marginal_generator(k, m1, u);
      const double direct = density_generator(low, u);
      const double mix = std::exp(log_cg_mixture_generator(low, u));
      worst = nan_max({worst, std::abs(marg / direct - 1.0), std::abs(marg / mix - 1.0)});
    }
  }
  return {worst, threshold(c, 1e-6), std::to_string(fams.size()) + " families, m=" + std::to_string(m) +
                                         " -> " + std::to_string(m1),
          {}};
}

CheckOutcome conditional_regression_check(const CheckContext& c) {
  json p = params(c);
  if (!p.contains("mu")) p["mu"] = std::vector<double>{1.0, -1.0, 0.5};
  const int m = p.value("m", 3);
  const DistributionSpec spec = make_spec(p.value("family", std::string("student(nu=8)")), m, p);
  const int split = p.value("split", 1);
  const int n = n_param(c, 200000);
  const int m2 = m - split;
  const SampleBatch b = sample_res(spec, n, c.plan.seed, c.stream_base);
  Matrix x(n, split + 1);
  x.col(0).setOnes();
  x.rightCols(split) = b.data.leftCols(split);
  const Matrix y = b.data.rightCols(m2);
  const Matrix coef = x.householderQr().solve(y);
  const Matrix resid = y - x * coef;
  const Matrix rcov = resid.transpose() * resid / static_cast<double>(n - split - 1);

  const ConditionalParams at0 = conditional_params(spec, split, Vector::Zero(split));
  Matrix slope(m2, split);
  for (int j = 0; j < split; ++j)
    slope.col(j) = conditional_params(spec, split, Vector::Unit(split, j)).mu_2given1 - at0.mu_2given1;
  const double cscale = QLaw(spec.kernel).mean() / m;
  const Matrix schur = cscale * at0.sigma_2given1.matrix();

  const double e_slope = (coef.bottomRows(split).transpose() - slope).norm() / slope.norm();
  const double e_icpt = (coef.row(0).transpose() - at0.mu_2given1).norm() / nan_max(1.0, at0.mu_2given1.norm());
  const double e_schur = (rcov - schur).norm() / schur.norm();
  return {nan_max({e_slope, e_icpt, e_schur}), threshold(c, 0.02),
          "slope " + fmt(e_slope) + ", intercept " + fmt(e_icpt) + ", Schur " + fmt(e_schur), {}};
}

CheckOutcome nc_pseudo_cov_check(const CheckContext& c) {
  const json& p = params(c);
  const int m = p.value("m", 1);
  const int n = n_param(c, 100000);
  const double kappa = p.value("kappa", 0.6);
  const FamilyKernel k = parse_family(p.value("family", std::string("gaussian")), m, Realness::ComplexNoncircular);
  const Matrix s = p.contains("sigma") ? matrix_from_json(p.at("sigma")) : (m == 1 ? Matrix::Ones(1, 1) : default_sigma(m));
  const CMatrix sigma = s.cast<Complex>();
  const CMatrix omega = kappa * sigma;
  const ComplexSpec spec(k, CVector::Zero(m), sigma, omega);
  const ComplexSampleBatch b = sample_nc_ces(spec, n, c.plan.seed, c.stream_base);
  CMatrix pseudo = CMatrix::Zero(m, m);
  for (int i = 0; i < n; ++i) pseudo += b.data.row(i).transpose() * b.data.row(i);
  pseudo /= static_cast<double>(n);
  const double cscale = QLaw(k).mean() / m;
  const double e = (pseudo - cscale * omega).norm() / (cscale * omega).norm();
  std::ostringstream os;
  os << "E[x x^T](0,0)=" << fmt(pseudo(0, 0).real()) << (pseudo(0, 0).imag() < 0 ? "" : "+") << fmt(pseudo(0, 0).imag())
     << "i, target " << fmt(cscale * omega(0, 0).real());
  return {e, threshold(c, 0.03), os.str(), {}};
}

}  // namespace

const std::map<std::string, CheckFn>& check_registry() {
  static const std::map<std::string, CheckFn> reg = {
      {"q-law-ks", q_law_ks},
      {"kurtosis", kurtosis_check},
      {"tyler-residual", tyler_residual_check},
      {"tyler-scale-invariance", tyler_invariance_check},
      {"ml-gaussian-closed-form", ml_gaussian_check},
      {"asymptotic-cov", asymptotic_cov_check},
      {"crb-gaussian-location", crb_gaussian_location_check},
      {"crb-efficiency", crb_efficiency_check},
      {"xi-closed-form", xi_closed_form_check},
      {"xi-bridge", xi_bridge_check},
      {"pdf-scale-ambiguity", pdf_scale_check},
      {"sigma2-bound", sigma2_bound_check},
      {"fourth-moment", fourth_moment_check},
      {"marginal-generator", marginal_generator_check},
      {"conditional-regression", conditional_regression_check},
      {"nc-pseudo-covariance", nc_pseudo_cov_check},
  };
  return reg;
}

std::vector<std::string> check_kinds() {
  std::vector<std::string> out;
  for (const auto& [k, f] : check_registry()) out.push_back(k);
  return out;
}

}  // namespace ces::harness

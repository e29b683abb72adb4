#include "ces/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "ces/kernels.hpp"
#include "ces/matrix_kit.hpp"

namespace ces {

std::string to_string(ShapeScale s) {
  switch (s) {
    case ShapeScale::None: return "none";
    case ShapeScale::Trace: return "trace";
    case ShapeScale::TopLeft: return "topleft";
    case ShapeScale::Determinant: return "det";
  }
  return "?";
}

ShapeScale parse_shape_scale(const std::string& text) {
  if (text == "none") return ShapeScale::None;
  if (text == "trace") return ShapeScale::Trace;
  if (text == "topleft" || text == "s11") return ShapeScale::TopLeft;
  if (text == "det" || text == "determinant") return ShapeScale::Determinant;
  throw std::invalid_argument("unknown shape scale '" + text + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::SampleMoments: return "scm";
    case Method::ML: return "ml";
    case Method::Maronna: return "m";
    case Method::Tyler: return "tyler";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  if (text == "scm" || text == "moments") return Method::SampleMoments;
  if (text == "ml") return Method::ML;
  if (text == "m" || text == "maronna" || text == "huber") return Method::Maronna;
  if (text == "tyler") return Method::Tyler;
  throw std::invalid_argument("unknown estimator '" + text + "'");
}

FitConfig known_mu_config(const Vector& mu, double tol, int max_iter) {
  FitConfig c;
  c.location = LocationMode::KnownMu;
  c.known_mu = mu;
  c.tol = tol;
  c.max_iter = max_iter;
  return c;
}

namespace {

void check_data(const DataMatrix& data, const char* who) {
  if (data.rows() == 0 || data.cols() == 0) throw std::invalid_argument(std::string(who) + ": empty data");
  if (!data.allFinite()) throw std::invalid_argument(std::string(who) + ": data contains non-finite values");
}

void check_fit(const DataMatrix& data, const FitConfig& cfg, const char* who) {
  check_data(data, who);
  const auto n = data.rows();
  const auto m = data.cols();
  if (n <= m) {
    std::ostringstream os;
    os << who << ": need n > m (n=" << n << ", m=" << m << ")";
    throw std::invalid_argument(os.str());
  }
  if (cfg.location == LocationMode::KnownMu && cfg.known_mu.size() != m)
    throw std::invalid_argument(std::string(who) + ": known mu has the wrong dimension");
  if (cfg.max_iter < 1) throw std::invalid_argument(std::string(who) + ": max_iter must be >= 1");
  if (cfg.init_sigma && (cfg.init_sigma->rows() != m || cfg.init_sigma->cols() != m))
    throw std::invalid_argument(std::string(who) + ": initial scatter has the wrong dimension");
}

Vector coordinatewise_median(const DataMatrix& data) {
  const auto n = data.rows();
  Vector med(data.cols());
  std::vector<double> col(n);
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) col[i] = data(i, j);
    const auto mid = col.begin() + n / 2;
    std::nth_element(col.begin(), mid, col.end());
    double v = *mid;
    if (n % 2 == 0) v = 0.5 * (v + *std::max_element(col.begin(), mid));
    med(j) = v;
  }
  return med;
}

Matrix lower_cholesky(const Matrix& s, const char* who, int iter) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success || !is_positive_definite(s)) {
    std::ostringstream os;
    os << who << ": scatter lost positive definiteness at iteration " << iter
       << " (min eigenvalue " << Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues().minCoeff() << ")";
    throw NotPositiveDefinite(os.str());
  }
  return llt.matrixL();
}

double rel_change(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

double mu_change(const Vector& a, const Vector& b, const Matrix& s) {
  const double ref = std::max(b.norm(), std::sqrt(s.trace() / s.rows()));
  return (a - b).norm() / std::max(ref, 1e-300);
}

Vector initial_mu(const DataMatrix& data, const FitConfig& cfg) {
  return cfg.location == LocationMode::KnownMu ? cfg.known_mu : coordinatewise_median(data);
}

Matrix initial_sigma(const DataMatrix& data, const Vector& mu, const FitConfig& cfg) {
  if (cfg.init_sigma) return *cfg.init_sigma;
  const Vector ones = Vector::Ones(data.rows());
  return kernels::weighted_scatter(data, mu, ones) / static_cast<double>(data.rows());
}

EstimateResult finish(EstimateResult r, const FitConfig& cfg) {
  if (cfg.shape != ShapeScale::None) {
    r.sigma_hat = shape_normalize(r.sigma_hat, cfg.shape);
    r.scale_constraint_applied = cfg.shape;
  }
  return r;
}

// Smallest c with mean psi2(c q_i) = m; psi2 nondecreasing so bisection in log c.
double scale_adjustment(const Vector& q, const WeightFunction& u2, int m) {
  auto f = [&](double c) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) s += u2.psi(c * q(i));
    return s / static_cast<double>(q.size()) - m;
  };
  const double f1 = f(1.0);
  if (std::abs(f1) <= 1e-14 * m) return 1.0;
  double lo = 1.0, hi = 1.0;
  if (f1 < 0.0) {
    int k = 0;
    while (f(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++k > 200) throw NumericalError("fit_maronna: scale equation has no root (sup psi2 <= m?)");
    }
  } else {
    int k = 0;
    while (f(lo) > 0.0) {
      hi = lo;
      lo *= 0.5;
      if (++k > 200) throw NumericalError("fit_maronna: scale equation has no root");
    }
  }
  // to full precision: the iteration cannot settle below the error in c
  for (int k = 0; k < 100; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

EstimateResult sample_moments(const DataMatrix& data) {
  check_data(data, "sample_moments");
  const auto n = data.rows();
  if (n < 2) throw std::invalid_argument("sample_moments: need at least two samples");
  EstimateResult r;
  const Vector ones = Vector::Ones(n);
  r.mu_hat = kernels::weighted_sum(data, ones) / static_cast<double>(n);
  Matrix s = kernels::weighted_scatter(data, r.mu_hat, ones) / static_cast<double>(n - 1);
  r.sigma_hat = SymMatrix(s);
  r.iterations = 1;
  r.residual_trace = {0.0};
  r.converged = true;
  r.singular = n <= data.cols() || !is_positive_definite(s);
  if (r.singular) r.note = "sample covariance is singular";
  return r;
}

double negative_log_likelihood(const DataMatrix& data, const Vector& mu, const SymMatrix& sigma,
                               const FamilyKernel& kernel) {
  if (kernel.is_complex()) throw std::invalid_argument("negative_log_likelihood: real kernel required");
  const Matrix l = cholesky_sqrt(sigma);
  const Vector q = kernels::mahalanobis_batch(data, mu, l);
  double nll = 0.5 * static_cast<double>(data.rows()) * log_det_spd(sigma);
  for (Eigen::Index i = 0; i < q.size(); ++i) nll -= log_density_generator(kernel, q(i));
  return nll;
}

EstimateResult fit_ml(const DataMatrix& data, const FamilyKernel& kernel, const FitConfig& cfg) {
  check_fit(data, cfg, "fit_ml");
  if (kernel.is_complex()) throw std::invalid_argument("fit_ml: real kernel required");
  if (kernel.dim() != data.cols()) throw std::invalid_argument("fit_ml: kernel dimension does not match the data");
  const auto n = static_cast<double>(data.rows());
  const Vector ones = Vector::Ones(data.rows());
  EstimateResult r;

  if (kernel.family() == FamilyTag::Gaussian) {
    r.mu_hat = cfg.location == LocationMode::KnownMu ? cfg.known_mu : Vector(kernels::weighted_sum(data, ones) / n);
    const Matrix s = kernel.lambda() * kernels::weighted_scatter(data, r.mu_hat, ones) / n;
    lower_cholesky(s, "fit_ml", 1);
    r.sigma_hat = SymMatrix(s);
    r.iterations = 1;
    r.residual_trace = {0.0};
    r.converged = true;
    r.nll_trace = {negative_log_likelihood(data, r.mu_hat, r.sigma_hat, kernel)};
    return finish(r, cfg);
  }

  Vector mu = initial_mu(data, cfg);
  Matrix sigma = initial_sigma(data, mu, cfg);
  Vector w(data.rows());
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const Matrix l = lower_cholesky(sigma, "fit_ml", it);
    const Vector q = kernels::mahalanobis_batch(data, mu, l);
    double nll = 0.5 * n * 2.0 * l.diagonal().array().log().sum();
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      nll -= log_density_generator(kernel, q(i));
      w(i) = score_phi(kernel, q(i));
    }
    if (!r.nll_trace.empty() && nll > r.nll_trace.back() + 1e-10 * std::abs(r.nll_trace.back()))
      r.nll_monotone = false;
    r.nll_trace.push_back(nll);

    Vector mu_new = mu;
    if (cfg.location == LocationMode::Joint) mu_new = kernels::weighted_sum(data, w) / w.sum();
    const Matrix sigma_new = kernels::weighted_scatter(data, mu_new, w) / n;
    const double res = rel_change(sigma_new, sigma) + mu_change(mu_new, mu, sigma);
    r.residual_trace.push_back(res);
    mu = mu_new;
    sigma = sigma_new;
    r.iterations = it;
    if (res < cfg.tol) {
      r.converged = true;
      break;
    }
  }
  lower_cholesky(sigma, "fit_ml", r.iterations);
  r.mu_hat = mu;
  r.sigma_hat = SymMatrix(0.5 * (sigma + sigma.transpose()));
  return finish(r, cfg);
}

EstimateResult fit_maronna(const DataMatrix& data, const WeightFunction& u1, const WeightFunction& u2,
                           const FitConfig& cfg) {
  check_fit(data, cfg, "fit_maronna");
  const int m = static_cast<int>(data.cols());
  const auto n = static_cast<double>(data.rows());
  EstimateResult r;
  const MaronnaConditions cond = check_maronna_conditions(u2, m);
  if (!cond.ok()) r.note = "weight conditions not met: " + cond.describe();

  Vector mu = initial_mu(data, cfg);
  Matrix sigma = initial_sigma(data, mu, cfg);
  Vector w(data.rows());
  Vector w1(data.rows());
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const Matrix l = lower_cholesky(sigma, "fit_maronna", it);
    const Vector q = kernels::mahalanobis_batch(data, mu, l);
    Vector mu_new = mu;
    Matrix sigma_new;
    if (cfg.location == LocationMode::KnownMu) {
      const double c = scale_adjustment(q, u2, m);
      for (Eigen::Index i = 0; i < q.size(); ++i) w(i) = u2(c * q(i));
      sigma_new = kernels::weighted_scatter(data, mu, w) / n;
    } else {
      for (Eigen::Index i = 0; i < q.size(); ++i) {
        w(i) = u2(q(i));
        w1(i) = u1(std::sqrt(q(i)));
      }
      const double s1 = w1.sum();
      if (!(s1 > 0.0)) throw NumericalError("fit_maronna: all location weights vanished");
      mu_new = kernels::weighted_sum(data, w1) / s1;
      sigma_new = kernels::weighted_scatter(data, mu_new, w) / n;
    }
    const double res = rel_change(sigma_new, sigma) + mu_change(mu_new, mu, sigma);
    r.residual_trace.push_back(res);
    mu = mu_new;
    sigma = sigma_new;
    r.iterations = it;
    if (!sigma.allFinite()) throw NumericalError("fit_maronna: iteration produced non-finite values");
    if (res < cfg.tol) {
      r.converged = true;
      break;
    }
  }
  lower_cholesky(sigma, "fit_maronna", r.iterations);
  r.mu_hat = mu;
  r.sigma_hat = SymMatrix(0.5 * (sigma + sigma.transpose()));
  return finish(r, cfg);
}

double tyler_residual(const DataMatrix& data, const Vector& mu, const SymMatrix& s) {
  const int m = s.dim();
  const Matrix l = cholesky_sqrt(s);
  const Vector q = kernels::mahalanobis_batch(data, mu, l);
  const Vector w = (static_cast<double>(m) / static_cast<double>(data.rows())) * q.cwiseInverse();
  const Matrix t = kernels::weighted_scatter(data, mu, w);
  return (s.matrix() - t).norm() / s.matrix().norm();
}

EstimateResult fit_tyler(const DataMatrix& data, const FitConfig& cfg) {
  if (cfg.location != LocationMode::KnownMu)
    throw std::invalid_argument("fit_tyler: a known center is required (LocationMode::KnownMu)");
  check_fit(data, cfg, "fit_tyler");
  const int m = static_cast<int>(data.cols());
  const auto n = static_cast<double>(data.rows());
  const Vector& mu = cfg.known_mu;

  int zeros = 0;
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    if ((data.row(i).transpose() - mu).squaredNorm() == 0.0) ++zeros;
  if (zeros > 0) {
    std::ostringstream os;
    os << "fit_tyler: " << zeros << " sample(s) coincide with the center";
    throw std::invalid_argument(os.str());
  }
  DataMatrix centered = data.rowwise() - mu.transpose();
  Eigen::JacobiSVD<Matrix> svd(Matrix(centered), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector sv = svd.singularValues();
  if (sv(m - 1) <= 1e-12 * sv(0)) throw std::invalid_argument("fit_tyler: centered data do not span R^m");

  EstimateResult r;
  Matrix sigma = initial_sigma(data, mu, cfg);
  sigma *= m / sigma.trace();
  Vector w(data.rows());
  for (int it = 1; it <= cfg.max_iter + 1; ++it) {
    const Matrix l = lower_cholesky(sigma, "fit_tyler", it);
    const Vector q = kernels::mahalanobis_batch(data, mu, l);
    for (Eigen::Index i = 0; i < q.size(); ++i) w(i) = m / (n * q(i));
    const Matrix t = kernels::weighted_scatter(data, mu, w);
    const double res = (sigma - t).norm() / sigma.norm();
    r.residual_trace.push_back(res);
    if (res < cfg.tol) {
      r.converged = true;
      break;
    }
    if (it > cfg.max_iter) break;
    sigma = t * (m / t.trace());
    r.iterations = it;
  }
  r.mu_hat = mu;
  r.sigma_hat = SymMatrix(0.5 * (sigma + sigma.transpose()));
  r.scale_constraint_applied = ShapeScale::Trace;
  if (cfg.shape != ShapeScale::None && cfg.shape != ShapeScale::Trace) return finish(r, cfg);
  return r;
}

double shape_functional(const SymMatrix& s, ShapeScale scale) {
  switch (scale) {
    case ShapeScale::None: return 1.0;
    case ShapeScale::Trace: return s.matrix().trace() / s.dim();
    case ShapeScale::TopLeft: return s(0, 0);
    case ShapeScale::Determinant: return std::exp(log_det_spd(s) / s.dim());
  }
  return 1.0;
}

SymMatrix shape_normalize(const SymMatrix& s, ShapeScale scale) {
  const double f = shape_functional(s, scale);
  if (!(f > 0.0) || !std::isfinite(f)) throw std::invalid_argument("shape_normalize: scale functional is not positive");
  return SymMatrix(s.matrix() / f);
}

EstimateResult fit(const DataMatrix& data, const EstimatorConfig& cfg) {
  switch (cfg.method) {
    case Method::SampleMoments: return finish(sample_moments(data), cfg.fit);
    case Method::ML:
      if (!cfg.kernel) throw std::invalid_argument("fit: ML needs a kernel");
      return fit_ml(data, *cfg.kernel, cfg.fit);
    case Method::Maronna: {
      const int m = static_cast<int>(data.cols());
      const WeightFunction u2 = cfg.u2 ? *cfg.u2 : weights::huber(m);
      const WeightFunction u1 = cfg.u1 ? *cfg.u1 : weights::location_from_scatter(u2);
      return fit_maronna(data, u1, u2, cfg.fit);
    }
    case Method::Tyler: return fit_tyler(data, cfg.fit);
  }
  throw std::invalid_argument("fit: unknown method");
}

}  // namespace ces

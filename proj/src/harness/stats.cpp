#include "ces/harness/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ces/special.hpp"

namespace ces::harness {

double nan_max(std::initializer_list<double> values) {
  double out = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (std::isnan(v)) return v;
    if (v > out) out = v;
  }
  return out;
}

namespace {

double effective_sqrt_n(double n) {
  const double s = std::sqrt(n);
  return s + 0.12 + 0.11 / s;
}

}  // namespace

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  const std::size_t n = samples.size();
  if (n < 20) throw std::invalid_argument("ks_test: need at least 20 samples");
  std::sort(samples.begin(), samples.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(samples[i]);
    d = nan_max({d, (i + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_sf(effective_sqrt_n(n) * d), n};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 20 || b.size() < 20) throw std::invalid_argument("ks_two_sample: need at least 20 samples each");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = a.size(), nb = b.size();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = nan_max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  return {d, kolmogorov_sf(effective_sqrt_n(ne) * d), static_cast<std::size_t>(ne)};
}

double ks_critical_value(std::size_t n, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("ks_critical_value: level must be in (0, 1)");
  return kolmogorov_quantile(1.0 - level) / effective_sqrt_n(static_cast<double>(n));
}

Matrix empirical_cov_of_vec(const std::vector<Matrix>& estimates, int n, int min_reps) {
  const int reps = static_cast<int>(estimates.size());
  if (reps < min_reps) throw std::invalid_argument("empirical_cov_of_vec: not enough replicates");
  const Eigen::Index d = estimates[0].size();
  Matrix v(d, reps);
  for (int r = 0; r < reps; ++r) v.col(r) = Eigen::Map<const Vector>(estimates[r].data(), d);
  const Vector mean = v.rowwise().mean();
  v.colwise() -= mean;
  return static_cast<double>(n) * (v * v.transpose()) / (reps - 1.0);
}

double max_relative_entry_error(const Matrix& e, const Matrix& t) {
  if (e.rows() != t.rows() || e.cols() != t.cols()) throw std::invalid_argument("max_relative_entry_error: shapes differ");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      const double scale = std::sqrt(std::abs(t(i, i) * t(j, j)));
      const double diff = std::abs(e(i, j) - t(i, j));
      if (scale > 0.0) worst = nan_max(worst, diff / scale);
      else if (diff > 0.0) worst = nan_max(worst, diff);
    }
  }
  return worst;
}

MeanSe batch_means(const std::vector<double>& x, int batches) {
  const std::size_t n = x.size();
  if (batches < 2 || n < static_cast<std::size_t>(batches)) throw std::invalid_argument("batch_means: too few samples");
  const std::size_t per = n / batches;
  std::vector<double> m(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) s += x[i];
    m[b] = s / per;
  }
  double mean = 0.0;
  for (double v : m) mean += v;
  mean /= batches;
  double var = 0.0;
  for (double v : m) var += (v - mean) * (v - mean);
  var /= batches - 1.0;
  return {mean, std::sqrt(var / batches)};
}

MeanSe kurtosis_from_q(const Vector& q, int m) {
  const double n = q.size();
  const double b = q.mean();
  const double a = q.array().square().mean();
  const double c = m / (m + 2.0);
  const double kappa = c * a / (b * b) - 1.0;
  // Influence of each draw on c A / B^2.
  const Eigen::ArrayXd inf = c * (q.array().square() - a) / (b * b) - 2.0 * c * a * (q.array() - b) / (b * b * b);
  const double sd = std::sqrt(inf.square().sum() / (n - 1.0));
  return {kappa, sd / std::sqrt(n)};
}

FourthMomentResult fourth_moment_identity(const DataMatrix& x, const Matrix& cov, double kappa) {
  const int m = static_cast<int>(x.cols());
  const double n = x.rows();
  FourthMomentResult r{0.0, 0};
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      for (int k = j; k < m; ++k)
        for (int l = k; l < m; ++l) {
          const Eigen::ArrayXd p = x.col(i).array() * x.col(j).array() * x.col(k).array() * x.col(l).array();
          const double mean = p.mean();
          const double sd = std::sqrt((p - mean).square().sum() / (n - 1.0));
          const double theory =
              (1.0 + kappa) * (cov(i, j) * cov(k, l) + cov(i, k) * cov(j, l) + cov(i, l) * cov(j, k));
          r.max_z = nan_max(r.max_z, std::abs(mean - theory) / (sd / std::sqrt(n)));
          ++r.quadruples;
        }
  return r;
}

}  // namespace ces::harness

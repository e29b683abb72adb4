#include "ces/sampler.hpp"

#include <cmath>

#include <boost/random/normal_distribution.hpp>

#include "ces/matrix_kit.hpp"

namespace ces {

namespace {

void check_count(int n) {
  if (n < 1) throw std::invalid_argument("sampler: n must be >= 1");
}

Vector normal_vector(int m, boost::random::normal_distribution<double>& nd, Philox4x32& eng) {
  Vector z(m);
  for (int j = 0; j < m; ++j) z(j) = nd(eng);
  return z;
}

CVector complex_normal_vector(int m, boost::random::normal_distribution<double>& nd, Philox4x32& eng) {
  const double h = std::sqrt(0.5);
  CVector z(m);
  for (int j = 0; j < m; ++j) {
    const double re = nd(eng);
    const double im = nd(eng);
    z(j) = Complex(h * re, h * im);
  }
  return z;
}

}  // namespace

DataMatrix sample_sphere(int m, int count, Philox4x32& eng) {
  if (m < 1) throw std::invalid_argument("sample_sphere: m must be >= 1");
  boost::random::normal_distribution<double> nd;
  DataMatrix out(count, m);
  for (int i = 0; i < count; ++i) {
    Vector z = normal_vector(m, nd, eng);
    double r = z.norm();
    while (r == 0.0) {
      z = normal_vector(m, nd, eng);
      r = z.norm();
    }
    out.row(i) = (z / r).transpose();
  }
  return out;
}

CDataMatrix sample_complex_sphere(int m, int count, Philox4x32& eng) {
  if (m < 1) throw std::invalid_argument("sample_complex_sphere: m must be >= 1");
  boost::random::normal_distribution<double> nd;
  CDataMatrix out(count, m);
  for (int i = 0; i < count; ++i) {
    CVector z = complex_normal_vector(m, nd, eng);
    double r = z.norm();
    while (r == 0.0) {
      z = complex_normal_vector(m, nd, eng);
      r = z.norm();
    }
    out.row(i) = (z / r).transpose();
  }
  return out;
}

SampleBatch sample_res(const DistributionSpec& spec, int n, std::uint64_t seed, std::uint64_t stream_id,
                       SampleRoute route) {
  check_count(n);
  const int m = spec.dim();
  const Matrix a = psd_sqrt(spec.sigma);
  Philox4x32 eng(seed, stream_id);
  DataMatrix data(n, m);
  boost::random::normal_distribution<double> nd;
  if (route == SampleRoute::Auto && spec.kernel.family() == FamilyTag::Gaussian) {
    const double c = 1.0 / std::sqrt(spec.kernel.lambda());
    for (int i = 0; i < n; ++i) data.row(i) = (spec.mu + c * (a * normal_vector(m, nd, eng))).transpose();
  } else {
    const QLaw law(spec.kernel);
    for (int i = 0; i < n; ++i) {
      Vector z = normal_vector(m, nd, eng);
      double r = z.norm();
      while (r == 0.0) {
        z = normal_vector(m, nd, eng);
        r = z.norm();
      }
      const double q = law.sample(eng);
      data.row(i) = (spec.mu + std::sqrt(q) / r * (a * z)).transpose();
    }
  }
  return {std::move(data), spec, seed, stream_id};
}

SampleBatch sample_cg(const DistributionSpec& spec, int n, std::uint64_t seed, std::uint64_t stream_id) {
  check_count(n);
  const auto tex = texture_law(spec.kernel);
  if (!tex) throw std::invalid_argument("sample_cg: kernel has no texture: " + spec.kernel.describe());
  const int m = spec.dim();
  const Matrix a = psd_sqrt(spec.sigma);
  Philox4x32 eng(seed, stream_id);
  boost::random::normal_distribution<double> nd;
  DataMatrix data(n, m);
  for (int i = 0; i < n; ++i) {
    const double tau = tex->sample(eng);
    data.row(i) = (spec.mu + std::sqrt(tau) * (a * normal_vector(m, nd, eng))).transpose();
  }
  return {std::move(data), spec, seed, stream_id};
}

ComplexSampleBatch sample_nc_ces(const ComplexSpec& spec, int n, std::uint64_t seed, std::uint64_t stream_id) {
  check_count(n);
  const int m = spec.dim();
  const NcFactorization fac = nc_factorization(spec);
  // D1^2 + D2^2 = I and 2 D1 D2 = diag(kappa).
  Vector d1(m), d2(m);
  for (int i = 0; i < m; ++i) {
    const double p = std::sqrt(1.0 + fac.kappa(i));
    const double q = std::sqrt(1.0 - fac.kappa(i));
    d1(i) = 0.5 * (p + q);
    d2(i) = 0.5 * (p - q);
  }
  const QLaw law(spec.kernel);
  Philox4x32 eng(seed, stream_id);
  boost::random::normal_distribution<double> nd;
  CDataMatrix data(n, m);
  for (int i = 0; i < n; ++i) {
    CVector z = complex_normal_vector(m, nd, eng);
    double r = z.norm();
    while (r == 0.0) {
      z = complex_normal_vector(m, nd, eng);
      r = z.norm();
    }
    const CVector u = z / r;
    CVector v = u;
    if (!spec.circular()) {
      for (int j = 0; j < m; ++j) v(j) = d1(j) * u(j) + d2(j) * std::conj(u(j));
    }
    const double q = law.sample(eng);
    data.row(i) = (spec.mu + std::sqrt(q) * (fac.a * v)).transpose();
  }
  return {std::move(data), spec, seed, stream_id};
}

ComplexSampleBatch sample_ccg(const ComplexSpec& spec, int n, std::uint64_t seed, std::uint64_t stream_id) {
  check_count(n);
  if (!spec.circular()) throw std::invalid_argument("sample_ccg: circular specs only");
  const auto tex = texture_law(spec.kernel);
  if (!tex) throw std::invalid_argument("sample_ccg: kernel has no texture: " + spec.kernel.describe());
  const int m = spec.dim();
  const CMatrix a = hermitian_sqrt(spec.sigma);
  Philox4x32 eng(seed, stream_id);
  boost::random::normal_distribution<double> nd;
  CDataMatrix data(n, m);
  for (int i = 0; i < n; ++i) {
    const double tau = tex->sample(eng);
    data.row(i) = (spec.mu + std::sqrt(tau) * (a * complex_normal_vector(m, nd, eng))).transpose();
  }
  return {std::move(data), spec, seed, stream_id};
}

DataMatrix sample_acg(const SymMatrix& sigma, int n, std::uint64_t seed, std::uint64_t stream_id) {
  check_count(n);
  const int m = sigma.dim();
  const Matrix a = psd_sqrt(sigma);
  Philox4x32 eng(seed, stream_id);
  boost::random::normal_distribution<double> nd;
  DataMatrix data(n, m);
  for (int i = 0; i < n; ++i) {
    Vector x = a * normal_vector(m, nd, eng);
    double r = x.norm();
    while (r == 0.0) {
      x = a * normal_vector(m, nd, eng);
      r = x.norm();
    }
    data.row(i) = (x / r).transpose();
  }
  return data;
}

DistributionSpec affine_spec(const DistributionSpec& spec, const Matrix& b_mat, const Vector& b_vec) {
  const int m = spec.dim();
  const int k = static_cast<int>(b_mat.rows());
  if (b_mat.cols() != m || b_vec.size() != k) throw std::invalid_argument("affine_transform: dimension mismatch");
  if (k > m) throw std::invalid_argument("affine_transform: B has more rows than columns");
  Eigen::FullPivLU<Matrix> lu(b_mat);
  if (lu.rank() < k) throw std::invalid_argument("affine_transform: B must have full row rank");
  if (k < m && !spec.kernel.is_compound_gaussian()) {
    throw std::invalid_argument("affine_transform: dimension reduction needs a compound-Gaussian kernel, got " +
                                spec.kernel.describe());
  }
  const Matrix s = b_mat * spec.sigma.matrix() * b_mat.transpose();
  return DistributionSpec(spec.kernel.with_dim(k), b_mat * spec.mu + b_vec, SymMatrix(0.5 * (s + s.transpose())));
}

SampleBatch affine_transform(const SampleBatch& batch, const Matrix& b_mat, const Vector& b_vec) {
  DistributionSpec spec = affine_spec(batch.spec, b_mat, b_vec);
  DataMatrix data = batch.data * b_mat.transpose();
  data.rowwise() += b_vec.transpose();
  return {std::move(data), std::move(spec), batch.seed, batch.stream_id};
}

}  // namespace ces

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "ces/distribution.hpp"
#include "ces/families.hpp"
#include "ces/harness/stats.hpp"
#include "ces/matrix_kit.hpp"
#include "ces/sampler.hpp"

using namespace ces;
using ces::harness::ks_test;
using ces::harness::ks_two_sample;

// Every KS test below runs at level 0.01 on a fixed seed, so each has a 1% false-failure
// rate over the choice of seed.

namespace {

constexpr std::uint64_t kSeed = 777;

Matrix test_sigma(int m) {
  Matrix s(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) s(i, j) = std::pow(0.4, std::abs(i - j)) * (1.0 + 0.3 * i) * (1.0 + 0.3 * j);
  return s;
}

std::vector<double> q_values(const SampleBatch& b) {
  const Matrix l = cholesky_sqrt(b.spec.sigma);
  std::vector<double> q(b.data.rows());
  for (Eigen::Index i = 0; i < b.data.rows(); ++i) {
    q[i] = l.triangularView<Eigen::Lower>().solve(b.data.row(i).transpose() - b.spec.mu).squaredNorm();
  }
  return q;
}

Matrix empirical_cov(const DataMatrix& x, const Vector& mu) {
  const DataMatrix c = x.rowwise() - mu.transpose();
  return c.transpose() * c / static_cast<double>(x.rows());
}

}  // namespace

TEST(Sphere, UnitNorms) {
  Philox4x32 eng(kSeed, 0);
  const DataMatrix u1 = sample_sphere(1, 1000, eng);
  int plus = 0;
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(std::abs(u1(i, 0)), 1.0);
    plus += u1(i, 0) > 0;
  }
  EXPECT_GT(plus, 400);
  EXPECT_LT(plus, 600);
  const DataMatrix u = sample_sphere(4, 1000, eng);
  for (int i = 0; i < 1000; ++i) EXPECT_NEAR(u.row(i).norm(), 1.0, 1e-12);
}

TEST(Sphere, IsotropicSecondMoment) {
  Philox4x32 eng(kSeed, 1);
  const DataMatrix u = sample_sphere(3, 100000, eng);
  const Matrix s = u.transpose() * u / 100000.0;
  EXPECT_LT((s - Matrix::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff(), 0.01);
}

TEST(SampleRes, GaussianChiSquare) {
  const auto b = sample_res(DistributionSpec(FamilyKernel::gaussian(2), Vector::Zero(2), SymMatrix::identity(2)), 10000, kSeed);
  const boost::math::chi_squared chi(2);
  EXPECT_GT(ks_test(q_values(b), [&](double q) { return boost::math::cdf(chi, q); }).p_value, 0.01);
}

TEST(SampleRes, StudentFisherF) {
  const DistributionSpec spec(FamilyKernel::student(3, 4.0), Vector::Constant(3, 1.0), SymMatrix(test_sigma(3)));
  const auto b = sample_res(spec, 10000, kSeed);
  const boost::math::fisher_f f(3, 4);
  EXPECT_GT(ks_test(q_values(b), [&](double q) { return boost::math::cdf(f, q / 3.0); }).p_value, 0.01);
}

TEST(SampleRes, QLawAllFamilies) {
  std::uint64_t stream = 0;
  for (int m : {1, 2, 3, 5}) {
    for (const auto& k : {FamilyKernel::gaussian(m), FamilyKernel::student(m, 2.5), scale_normalize(FamilyKernel::student(m, 1.0)),
                          FamilyKernel::generalized_gaussian_cov(m, 0.5), FamilyKernel::generalized_gaussian(m, 3.0, 1.0),
                          FamilyKernel::k_dist(m, 0.8), FamilyKernel::eps_contaminated(m, 0.2, 5.0)}) {
      const DistributionSpec spec(k, Vector::Zero(m), SymMatrix(test_sigma(m)));
      const auto b = sample_res(spec, 10000, kSeed, ++stream);
      const QLaw law(k);
      EXPECT_GT(ks_test(q_values(b), [&](double q) { return law.cdf(q); }).p_value, 0.01) << k.describe();
    }
  }
}

TEST(SampleRes, BitReproducible) {
  const DistributionSpec spec(FamilyKernel::k_dist(3, 1.5), Vector::Zero(3), SymMatrix(test_sigma(3)));
  const auto a = sample_res(spec, 500, 99, 4);
  const auto b = sample_res(spec, 500, 99, 4);
  EXPECT_EQ(a.data, b.data);
  EXPECT_EQ(a.seed, 99u);
  EXPECT_EQ(a.stream_id, 4u);
  const auto c = sample_res(spec, 500, 99, 5);
  EXPECT_NE(a.data, c.data);
}

TEST(SampleRes, StreamsUncorrelated) {
  const int n = 20000;
  const DistributionSpec spec(FamilyKernel::gaussian(2), Vector::Zero(2), SymMatrix::identity(2));
  const auto a = sample_res(spec, n, kSeed, 10);
  const auto b = sample_res(spec, n, kSeed, 11);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_LT(std::abs(a.data.col(i).dot(b.data.col(j)) / n), 4.0 / std::sqrt(n));
}

TEST(SampleRes, ModularVariateIndependentOfDirection) {
  const int n = 20000, m = 3;
  const DistributionSpec spec(FamilyKernel::student(m, 5.0), Vector::Zero(m), SymMatrix::identity(m));
  const auto b = sample_res(spec, n, kSeed);
  std::vector<double> q = q_values(b);
  Vector qv = Eigen::Map<Vector>(q.data(), n);
  Vector r = qv.cwiseSqrt();
  Vector rank_q = qv;  // Student Q has heavy tails; use log Q for a finite-variance correlation
  for (int i = 0; i < n; ++i) rank_q(i) = std::log(qv(i));
  rank_q.array() -= rank_q.mean();
  const double sq = std::sqrt(rank_q.squaredNorm() / n);
  for (int j = 0; j < m; ++j) {
    Vector u = b.data.col(j).cwiseQuotient(r);
    u.array() -= u.mean();
    const double corr = rank_q.dot(u) / n / (sq * std::sqrt(u.squaredNorm() / n));
    EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(n));
  }
}

TEST(SampleRes, GaussianRoutesAgree) {
  const DistributionSpec spec(FamilyKernel::gaussian(3), Vector::Zero(3), SymMatrix(test_sigma(3)));
  const auto a = sample_res(spec, 10000, kSeed, 0, SampleRoute::Auto);
  const auto b = sample_res(spec, 10000, kSeed, 1, SampleRoute::Generic);
  EXPECT_GT(ks_two_sample(q_values(a), q_values(b)).p_value, 0.01);
  for (int j = 0; j < 3; ++j) {
    std::vector<double> x(a.data.col(j).begin(), a.data.col(j).end()), y(b.data.col(j).begin(), b.data.col(j).end());
    EXPECT_GT(ks_two_sample(x, y).p_value, 0.01);
  }
}

TEST(SampleRes, DegenerateLimitIsCenter) {
  // a tiny scatter collapses the draws onto mu
  const Vector mu = Eigen::Vector2d(3.0, -1.0);
  const auto b = sample_res(DistributionSpec(FamilyKernel::gaussian(2), mu, SymMatrix(1e-30 * Matrix::Identity(2, 2))), 10, kSeed);
  for (int i = 0; i < 10; ++i) EXPECT_LT((b.data.row(i).transpose() - mu).norm(), 1e-12);
}

TEST(SampleCg, MatchesResRoute) {
  const DistributionSpec spec(FamilyKernel::student(2, 6.0), Vector::Zero(2), SymMatrix(test_sigma(2)));
  const auto a = sample_cg(spec, 10000, kSeed, 0);
  const auto b = sample_res(spec, 10000, kSeed, 1);
  EXPECT_GT(ks_two_sample(q_values(a), q_values(b)).p_value, 0.01);
}

TEST(SampleCg, GaussianTextureIsGaussian) {
  const DistributionSpec spec(FamilyKernel::gaussian(2), Vector::Zero(2), SymMatrix::identity(2));
  const boost::math::chi_squared chi(2);
  EXPECT_GT(ks_test(q_values(sample_cg(spec, 10000, kSeed)), [&](double q) { return boost::math::cdf(chi, q); }).p_value, 0.01);
}

TEST(SampleCg, KCovarianceIsMeanTextureTimesScatter) {
  const Matrix s = test_sigma(2);
  const DistributionSpec spec(FamilyKernel::k_dist(2, 1.0), Vector::Zero(2), SymMatrix(s));
  const auto b = sample_cg(spec, 100000, kSeed);
  const Matrix target = texture_law(spec.kernel)->mean() * s;
  EXPECT_LT((empirical_cov(b.data, spec.mu) - target).norm() / target.norm(), 0.03);
}

// Student texture in the textbook scale has E tau = nu/(nu-2): cov(x) = nu/(nu-2) Sigma.
TEST(SampleCg, StudentTextureMean) {
  const double nu = 6.0;
  const Matrix s = test_sigma(2);
  const DistributionSpec spec(FamilyKernel::student(2, nu), Vector::Zero(2), SymMatrix(s));
  const Matrix c = empirical_cov(sample_cg(spec, 200000, kSeed).data, spec.mu);
  const Matrix target = nu / (nu - 2.0) * s;
  EXPECT_LT((c - target).norm() / target.norm(), 0.03);
  EXPECT_GT((c - 0.5 * target).norm() / target.norm(), 0.3);
}

TEST(SampleCg, RejectsNonCompound) {
  const DistributionSpec spec(FamilyKernel::generalized_gaussian(2, 2.0, 1.0), Vector::Zero(2), SymMatrix::identity(2));
  EXPECT_THROW(sample_cg(spec, 10, kSeed), std::invalid_argument);
}

TEST(SampleNc, CircularGaussianBlocks) {
  const int n = 100000;
  CMatrix s(2, 2);
  s << 2.0, Complex(0.5, 0.3), Complex(0.5, -0.3), 1.0;
  const ComplexSpec spec(FamilyKernel::gaussian(2, Realness::ComplexCircular), CVector::Zero(2), s);
  const auto b = sample_nc_ces(spec, n, kSeed);
  const CMatrix cov = b.data.transpose() * b.data.conjugate() / static_cast<double>(n);
  const CMatrix pcov = b.data.transpose() * b.data / static_cast<double>(n);
  EXPECT_LT((cov - s).cwiseAbs().maxCoeff(), 0.03);
  EXPECT_LT(pcov.cwiseAbs().maxCoeff(), 0.03);
  // real composite [Re; Im] has covariance 1/2 [[Re S, -Im S], [Im S, Re S]]
  Matrix z(n, 4);
  z << b.data.real(), b.data.imag();
  Matrix target(4, 4);
  target << s.real(), -s.imag(), s.imag(), s.real();
  EXPECT_LT((z.transpose() * z / n - 0.5 * target).cwiseAbs().maxCoeff(), 0.02);
}

TEST(SampleNc, PseudoCovarianceScalar) {
  const double kappa = 0.6;
  CMatrix s = CMatrix::Identity(1, 1), w = CMatrix::Constant(1, 1, kappa);
  const ComplexSpec spec(FamilyKernel::gaussian(1, Realness::ComplexNoncircular), CVector::Zero(1), s, w);
  const auto b = sample_nc_ces(spec, 100000, kSeed);
  const Complex e = (b.data.array() * b.data.array()).mean();
  EXPECT_NEAR(e.real(), kappa, 0.03);
  EXPECT_NEAR(e.imag(), 0.0, 0.03);
}

TEST(SampleNc, FullyNoncircularIsReal) {
  CMatrix s(2, 2);
  s << 2.0, Complex(0.5, 0.3), Complex(0.5, -0.3), 1.0;
  const ComplexSpec probe(FamilyKernel::student(2, 5.0, Realness::ComplexCircular), CVector::Zero(2), s);
  // Omega = A A^T gives kappa = (1, 1)
  const CMatrix a = hermitian_sqrt(s);
  const ComplexSpec spec(probe.kernel, CVector::Zero(2), s, CMatrix(a * a.transpose()));
  const NcFactorization f = nc_factorization(spec);
  EXPECT_NEAR(f.kappa.minCoeff(), 1.0, 1e-10);
  const auto b = sample_nc_ces(spec, 2000, kSeed);
  const CMatrix y = f.a.inverse() * b.data.transpose();
  // sqrt(1 - kappa) turns rounding in kappa ~ 1 into ~1e-8 relative noise
  EXPECT_LT(y.imag().cwiseAbs().maxCoeff(), 1e-6 * y.cwiseAbs().maxCoeff());
}

TEST(SampleNc, InfeasibleOmega) {
  CMatrix s = CMatrix::Identity(1, 1), w = CMatrix::Constant(1, 1, 1.5);
  try {
    ComplexSpec spec(FamilyKernel::gaussian(1, Realness::ComplexNoncircular), CVector::Zero(1), s, w);
    FAIL() << "expected an infeasibility error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("1.5"), std::string::npos) << e.what();
  }
}

TEST(SampleNc, CompoundRouteAgrees) {
  CMatrix s(2, 2);
  s << 1.5, Complex(0.2, 0.4), Complex(0.2, -0.4), 1.0;
  const ComplexSpec spec(FamilyKernel::k_dist(2, 1.5, Realness::ComplexCircular), CVector::Zero(2), s);
  const auto a = sample_nc_ces(spec, 10000, kSeed, 0);
  const auto b = sample_ccg(spec, 10000, kSeed, 1);
  auto q = [&](const CDataMatrix& d) {
    const CMatrix inv = s.inverse();
    std::vector<double> out(d.rows());
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      const CVector x = d.row(i).transpose();
      out[i] = (x.adjoint() * inv * x)(0, 0).real();
    }
    return out;
  };
  const auto qa = q(a.data);
  EXPECT_GT(ks_two_sample(qa, q(b.data)).p_value, 0.01);
  const QLaw law(spec.kernel);
  EXPECT_GT(ks_test(qa, [&](double t) { return law.cdf(t); }).p_value, 0.01);
}

TEST(SampleAcg, Isotropic) {
  const DataMatrix x = sample_acg(SymMatrix::identity(3), 100000, kSeed);
  for (int i = 0; i < 100; ++i) EXPECT_NEAR(x.row(i).norm(), 1.0, 1e-12);
  EXPECT_LT((x.transpose() * x / 100000.0 - Matrix::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff(), 0.01);
}

TEST(SampleAcg, Ordering) {
  Matrix s = Eigen::Vector2d(4.0, 1.0).asDiagonal();
  const DataMatrix x = sample_acg(SymMatrix(s), 100000, kSeed);
  EXPECT_GT(x.col(0).squaredNorm(), x.col(1).squaredNorm());
}

TEST(SampleAcg, ScaleInvariant) {
  const Matrix s = test_sigma(3);
  const DataMatrix a = sample_acg(SymMatrix(s), 1000, kSeed);
  const DataMatrix b = sample_acg(SymMatrix(25.0 * s), 1000, kSeed);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SampleAcg, ProjectionOfElliptical) {
  const Matrix s = test_sigma(3);
  const auto res = sample_res(DistributionSpec(FamilyKernel::student(3, 3.0), Vector::Zero(3), SymMatrix(s)), 10000, kSeed, 0);
  const DataMatrix acg = sample_acg(SymMatrix(s), 10000, kSeed, 1);
  for (int j = 0; j < 3; ++j) {
    std::vector<double> a(10000), b(10000);
    for (int i = 0; i < 10000; ++i) {
      a[i] = res.data(i, j) / res.data.row(i).norm();
      b[i] = acg(i, j);
    }
    EXPECT_GT(ks_two_sample(a, b).p_value, 0.01);
  }
}

TEST(Affine, Identity) {
  const auto b = sample_res(DistributionSpec(FamilyKernel::student(2, 4.0), Vector::Zero(2), SymMatrix(test_sigma(2))), 100, kSeed);
  const auto c = affine_transform(b, Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_EQ(c.data, b.data);
  EXPECT_EQ(c.spec.sigma.matrix(), b.spec.sigma.matrix());
}

TEST(Affine, MarginalSpec) {
  const Matrix s = test_sigma(4);
  const Vector mu = Eigen::Vector4d(1, 2, 3, 4);
  const DistributionSpec spec(FamilyKernel::k_dist(4, 2.0), mu, SymMatrix(s));
  Matrix sel = Matrix::Zero(2, 4);
  sel.leftCols(2).setIdentity();
  const DistributionSpec marg = affine_spec(spec, sel, Vector::Zero(2));
  EXPECT_EQ(marg.mu, mu.head(2));
  EXPECT_EQ(marg.sigma.matrix(), s.topLeftCorner(2, 2));
  EXPECT_EQ(marg.kernel.dim(), 2);
  EXPECT_EQ(marg.kernel.nu(), 2.0);
}

TEST(Affine, GaussianQLawPreserved) {
  const auto b = sample_res(DistributionSpec(FamilyKernel::gaussian(2), Vector::Zero(2), SymMatrix::identity(2)), 10000, kSeed);
  Matrix bm(2, 2);
  bm << 2.0, 1.0, -0.5, 3.0;
  const auto c = affine_transform(b, bm, Eigen::Vector2d(1.0, -2.0));
  const boost::math::chi_squared chi(2);
  EXPECT_GT(ks_test(q_values(c), [&](double q) { return boost::math::cdf(chi, q); }).p_value, 0.01);
}

TEST(Affine, Errors) {
  const DistributionSpec spec(FamilyKernel::gaussian(2), Vector::Zero(2), SymMatrix::identity(2));
  Matrix bad(2, 2);
  bad << 1, 2, 2, 4;
  EXPECT_THROW(affine_spec(spec, bad, Vector::Zero(2)), std::invalid_argument);
  const DistributionSpec gg(FamilyKernel::generalized_gaussian(2, 2.0, 1.0), Vector::Zero(2), SymMatrix::identity(2));
  EXPECT_THROW(affine_spec(gg, Matrix::Identity(1, 2), Vector::Zero(1)), std::invalid_argument);
}

TEST(Marginal, StudentUnivariateIsStudent) {
  const double nu = 5.0;
  const Matrix s = test_sigma(3);
  const auto b = sample_res(DistributionSpec(FamilyKernel::student(3, nu), Vector::Zero(3), SymMatrix(s)), 10000, kSeed);
  std::vector<double> x(10000);
  for (int i = 0; i < 10000; ++i) x[i] = b.data(i, 1) / std::sqrt(s(1, 1));
  const boost::math::students_t t(nu);
  EXPECT_GT(ks_test(x, [&](double v) { return boost::math::cdf(t, v); }).p_value, 0.01);
}

TEST(FourthMoment, StudentIdentity) {
  const DistributionSpec spec(scale_normalize(FamilyKernel::student(2, 10.0)), Vector::Zero(2), SymMatrix(test_sigma(2)));
  const auto b = sample_res(spec, 1000000, kSeed);
  const auto r = harness::fourth_moment_identity(b.data, spec.sigma.matrix(), kurtosis(spec.kernel));
  EXPECT_EQ(r.quadruples, 5);
  EXPECT_LT(r.max_z, 5.0);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ces/density.hpp"
#include "ces/distribution.hpp"
#include "ces/families.hpp"
#include "ces/matrix_kit.hpp"
#include "ces/sampler.hpp"

using namespace ces;

namespace {

Matrix sigma2() {
  Matrix s(2, 2);
  s << 2.0, 0.6, 0.6, 1.0;
  return s;
}

CMatrix csigma2() {
  CMatrix s(2, 2);
  s << 2.0, Complex(0.5, 0.3), Complex(0.5, -0.3), 1.0;
  return s;
}

std::vector<FamilyKernel> kernels(int m) {
  return {FamilyKernel::gaussian(m), FamilyKernel::student(m, 3.0), FamilyKernel::generalized_gaussian(m, 0.6, 1.0),
          FamilyKernel::k_dist(m, 1.5), FamilyKernel::eps_contaminated(m, 0.2, 4.0)};
}

}  // namespace

TEST(PdfRes, GaussianOrigin) {
  const DistributionSpec spec(FamilyKernel::gaussian(1), Vector::Zero(1), SymMatrix::identity(1));
  EXPECT_NEAR(pdf_res(spec, Vector::Zero(1)).pdf, 1.0 / std::sqrt(2 * M_PI), 1e-16);
}

TEST(PdfRes, StudentAtCenter) {
  const double nu = 3.0;
  const Matrix s = sigma2();
  const DistributionSpec spec(FamilyKernel::student(2, nu), Eigen::Vector2d(1, -1), SymMatrix(s));
  const double expect = std::tgamma((nu + 2) / 2) / (nu * M_PI * std::tgamma(nu / 2) * std::sqrt(s.determinant()));
  EXPECT_NEAR(pdf_res(spec, spec.mu).pdf / expect, 1.0, 1e-14);
}

TEST(PdfRes, GaussianMatchesTextbook) {
  std::mt19937_64 g(1);
  std::normal_distribution<double> n;
  const Matrix s = sigma2();
  const Vector mu = Eigen::Vector2d(0.3, -0.2);
  const DistributionSpec spec(FamilyKernel::gaussian(2), mu, SymMatrix(s));
  for (int i = 0; i < 20; ++i) {
    Vector x = Eigen::Vector2d(n(g), n(g));
    const double oracle = std::exp(-0.5 * (x - mu).dot(s.inverse() * (x - mu))) / (2 * M_PI * std::sqrt(s.determinant()));
    EXPECT_NEAR(pdf_res(spec, x).pdf / oracle, 1.0, 1e-13);
  }
}

TEST(PdfRes, ScaleAmbiguity) {
  std::mt19937_64 g(2);
  std::normal_distribution<double> n;
  const Matrix s = sigma2();
  for (const auto& k : kernels(2)) {
    const DistributionSpec a(k, Vector::Zero(2), SymMatrix(s));
    for (double c : {0.5, 2.0}) {
      // (c^2 Sigma, c^m g(c^2 .)) is the kernel rescaled by lambda' = lambda c^2
      const DistributionSpec b(k.with_scale(k.lambda() * c * c), Vector::Zero(2), SymMatrix(c * c * s));
      for (int i = 0; i < 50; ++i) {
        Vector x = Eigen::Vector2d(2 * n(g), 2 * n(g));
        EXPECT_NEAR(pdf_res(b, x).log_pdf - pdf_res(a, x).log_pdf, 0.0, 1e-12) << k.describe();
      }
    }
  }
}

TEST(PdfRes, IntegratesToOne) {
  // m = 1: half-line integral of 2 pdf(x); m = 2: polar form 2 pi int r pdf(r e1) dr for Sigma = I
  for (const auto& k : kernels(1)) {
    const DistributionSpec spec(k, Vector::Zero(1), SymMatrix::identity(1));
    QuadConfig cfg;
    cfg.scale = std::sqrt(typical_q(k));
    const double v = integrate_half_line([&](double x) { return 2.0 * pdf_res(spec, Vector::Constant(1, x)).pdf; }, cfg).value;
    EXPECT_NEAR(v, 1.0, 1e-4) << k.describe();
  }
  for (const auto& k : kernels(2)) {
    const DistributionSpec spec(k, Vector::Zero(2), SymMatrix::identity(2));
    QuadConfig cfg;
    cfg.scale = std::sqrt(typical_q(k));
    const double v =
        integrate_half_line([&](double r) { return 2 * M_PI * r * pdf_res(spec, Eigen::Vector2d(r, 0.0)).pdf; }, cfg).value;
    EXPECT_NEAR(v, 1.0, 1e-4) << k.describe();
  }
}

TEST(PdfRes, NoOverflowFarOut) {
  const DistributionSpec spec(FamilyKernel::generalized_gaussian(2, 2.0, 1.0), Vector::Zero(2), SymMatrix::identity(2));
  const auto v = pdf_res(spec, Eigen::Vector2d(1e6, 0.0));
  EXPECT_TRUE(std::isfinite(v.log_pdf));
  EXPECT_EQ(v.pdf, 0.0);
  const DistributionSpec st(FamilyKernel::student(2, 1.0), Vector::Zero(2), SymMatrix::identity(2));
  EXPECT_TRUE(std::isfinite(pdf_res(st, Eigen::Vector2d(1e6, 0.0)).log_pdf));
}

TEST(PdfComplex, CircularGaussianCenter) {
  const ComplexSpec spec(FamilyKernel::gaussian(1, Realness::ComplexCircular), CVector::Zero(1), CMatrix::Identity(1, 1));
  EXPECT_NEAR(pdf_complex(spec, CVector::Zero(1)).pdf, 1.0 / M_PI, 1e-15);
}

TEST(PdfComplex, CircularReduction) {
  std::mt19937_64 g(3);
  std::normal_distribution<double> n;
  const CMatrix s = csigma2();
  for (const auto& k : kernels(2)) {
    const ComplexSpec spec(k.with_realness(Realness::ComplexCircular), CVector::Zero(2), s);
    for (int i = 0; i < 20; ++i) {
      CVector x(2);
      x << Complex(n(g), n(g)), Complex(n(g), n(g));
      const double q = (x.adjoint() * s.inverse() * x)(0, 0).real();
      const double oracle = -std::log(s.determinant().real()) + log_density_generator(spec.kernel, q);
      EXPECT_NEAR(pdf_complex(spec, x).log_pdf, oracle, 1e-12) << k.describe();
    }
  }
}

TEST(PdfComplex, GaussianClosedForm) {
  const CMatrix s = csigma2();
  const ComplexSpec spec(FamilyKernel::gaussian(2, Realness::ComplexCircular), CVector::Zero(2), s);
  CVector x(2);
  x << Complex(0.4, -1.0), Complex(0.2, 0.7);
  const double q = (x.adjoint() * s.inverse() * x)(0, 0).real();
  EXPECT_NEAR(pdf_complex(spec, x).pdf, std::exp(-q) / (M_PI * M_PI * s.determinant().real()), 1e-14);
}

TEST(PdfComplex, RealCompositeIdentity) {
  std::mt19937_64 g(4);
  std::normal_distribution<double> n;
  const CMatrix s = csigma2();
  CMatrix w(2, 2);
  w << Complex(0.8, 0.2), Complex(0.1, 0.1), Complex(0.1, 0.1), 0.3;
  for (const auto& k : kernels(2)) {
    const ComplexSpec spec(k.with_realness(Realness::ComplexNoncircular), CVector::Zero(2), s, w);
    const DistributionSpec real = composite_real_spec(spec);
    EXPECT_EQ(real.dim(), 4);
    for (int i = 0; i < 20; ++i) {
      CVector x(2);
      x << Complex(n(g), n(g)), Complex(n(g), n(g));
      EXPECT_NEAR(pdf_complex(spec, x).log_pdf, pdf_res(real, composite_real_vector(x)).log_pdf, 1e-12) << k.describe();
    }
  }
}

TEST(PdfComplex, ScalarNoncircularGaussian) {
  // x = a + ib with E|x|^2 = 1, E x^2 = 0.5: var a = 0.75, var b = 0.25, independent
  const ComplexSpec spec(FamilyKernel::gaussian(1, Realness::ComplexNoncircular), CVector::Zero(1),
                         CMatrix::Identity(1, 1), CMatrix::Constant(1, 1, 0.5));
  for (double a : {0.0, 0.5, -1.2}) {
    for (double b : {0.0, 0.3, 1.0}) {
      const double oracle = std::exp(-0.5 * (a * a / 0.75 + b * b / 0.25)) / (2 * M_PI * std::sqrt(0.75 * 0.25));
      EXPECT_NEAR(pdf_complex(spec, CVector::Constant(1, Complex(a, b))).pdf / oracle, 1.0, 1e-13);
    }
  }
}

TEST(PdfQ, GaussianForms) {
  for (double q : {0.0, 0.5, 3.0}) EXPECT_NEAR(pdf_q(FamilyKernel::gaussian(2), q), 0.5 * std::exp(-q / 2), 1e-15);
  for (double r : {0.0, 0.5, 3.0})
    EXPECT_NEAR(pdf_r(FamilyKernel::gaussian(1), r), std::sqrt(2 / M_PI) * std::exp(-r * r / 2), 1e-15);
}

TEST(PdfQ, ChangeOfVariable) {
  for (const auto& k : kernels(3)) {
    for (int i = 1; i <= 20; ++i) {
      const double r = 0.2 * i;
      EXPECT_NEAR(pdf_r(k, r) / (2 * r * pdf_q(k, r * r)), 1.0, 1e-12);
    }
  }
}

TEST(PdfQ, Normalized) {
  for (const auto& k : kernels(2)) {
    QuadConfig cfg;
    cfg.scale = typical_q(k);
    EXPECT_NEAR(integrate_half_line([&](double q) { return pdf_q(k, q); }, cfg).value, 1.0, 1e-8) << k.describe();
    cfg.scale = std::sqrt(typical_q(k));
    EXPECT_NEAR(integrate_half_line([&](double r) { return pdf_r(k, r); }, cfg).value, 1.0, 1e-8) << k.describe();
  }
}

TEST(MarginalGenerator, GaussianClosedForm) {
  for (double u : {0.0, 0.5, 3.0})
    EXPECT_NEAR(marginal_generator(FamilyKernel::gaussian(4), 2, u) / (std::exp(-u / 2) / (2 * M_PI)), 1.0, 1e-8);
}

TEST(MarginalGenerator, StudentUnivariate) {
  const FamilyKernel k = FamilyKernel::student(3, 4.0);
  for (double u : {0.0, 0.3, 2.0, 10.0})
    EXPECT_NEAR(marginal_generator(k, 1, u) / density_generator(k.with_dim(1), u), 1.0, 1e-6);
}

TEST(MarginalGenerator, CompoundKernelsAreConsistent) {
  for (const auto& k : {FamilyKernel::k_dist(5, 0.9), FamilyKernel::eps_contaminated(4, 0.2, 4.0), FamilyKernel::student(5, 2.0)}) {
    for (int m1 : {1, 2, 3}) {
      for (double u : {0.05, 1.0, 6.0})
        EXPECT_NEAR(marginal_generator(k, m1, u) / density_generator(k.with_dim(m1), u), 1.0, 1e-6) << k.describe();
    }
  }
}

TEST(MarginalGenerator, GeneralizedGaussianIsNotPowerExponential) {
  const FamilyKernel k = FamilyKernel::generalized_gaussian(3, 2.0, 1.0);
  double worst = 0.0;
  for (double u : {0.0, 0.5, 1.0, 2.0, 4.0})
    worst = std::max(worst, std::abs(marginal_generator(k, 1, u) / density_generator(k.with_dim(1), u) - 1.0));
  EXPECT_GT(worst, 1e-3);
  // but it is still a density generator in dimension 1
  QuadConfig cfg;
  const double total = integrate_half_line([&](double t) { return t > 0 ? std::pow(t, -0.5) * marginal_generator(k, 1, t) : 0.0; }, cfg).value;
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(MarginalGenerator, Errors) {
  EXPECT_THROW(marginal_generator(FamilyKernel::gaussian(3), 3, 1.0), std::invalid_argument);
  EXPECT_THROW(marginal_generator(FamilyKernel::gaussian(3), 0, 1.0), std::invalid_argument);
}

TEST(Conditional, HandArithmetic) {
  const DistributionSpec id(FamilyKernel::student(3, 5.0), Eigen::Vector3d(1, 2, 3), SymMatrix::identity(3));
  const auto c0 = conditional_params(id, 1, Vector::Constant(1, 7.0));
  EXPECT_EQ(c0.mu_2given1, Eigen::Vector2d(2, 3));
  EXPECT_EQ(c0.sigma_2given1.matrix(), Matrix::Identity(2, 2));
  Matrix s(2, 2);
  s << 2, 1, 1, 2;
  const DistributionSpec spec(FamilyKernel::gaussian(2), Vector::Zero(2), SymMatrix(s));
  const auto c = conditional_params(spec, 1, Vector::Constant(1, 2.0));
  EXPECT_DOUBLE_EQ(c.mu_2given1(0), 1.0);
  EXPECT_DOUBLE_EQ(c.sigma_2given1(0, 0), 1.5);
  EXPECT_EQ(c.sigma_2given1.matrix(), schur_conditional(SymMatrix(s), 1).s2given1.matrix());
}

TEST(Conditional, RegressionSlope) {
  Matrix s(2, 2);
  s << 2, 0.8, 0.8, 1.5;
  const DistributionSpec spec(FamilyKernel::gaussian(2), Vector::Zero(2), SymMatrix(s));
  const auto b = sample_res(spec, 100000, 31);
  const double slope = b.data.col(0).dot(b.data.col(1)) / b.data.col(0).squaredNorm();
  EXPECT_NEAR(slope / 0.4, 1.0, 0.02);
}

TEST(Conditional, CompoundGaussianConditionalPdf) {
  // p(x2 | x1) integrates to one over x2
  Matrix s(2, 2);
  s << 2, 0.8, 0.8, 1.5;
  const DistributionSpec spec(FamilyKernel::student(2, 3.0), Vector::Zero(2), SymMatrix(s));
  QuadConfig cfg;
  const double x1 = 1.3;
  const auto c = conditional_params(spec, 1, Vector::Constant(1, x1));
  auto f = [&](double d) {
    return pdf_conditional_cg(spec, 1, Eigen::Vector2d(x1, c.mu_2given1(0) + d)).pdf +
           pdf_conditional_cg(spec, 1, Eigen::Vector2d(x1, c.mu_2given1(0) - d)).pdf;
  };
  EXPECT_NEAR(integrate_half_line(f, cfg).value, 1.0, 1e-8);
  const DistributionSpec gg(FamilyKernel::generalized_gaussian(2, 2.0, 1.0), Vector::Zero(2), SymMatrix(s));
  EXPECT_THROW(pdf_conditional_cg(gg, 1, Eigen::Vector2d(0, 0)), std::invalid_argument);
}

TEST(CgMixture, MatchesClosedForm) {
  const Matrix s = sigma2();
  std::mt19937_64 g(5);
  std::normal_distribution<double> n;
  for (const auto& k : {FamilyKernel::gaussian(2), FamilyKernel::student(2, 4.0), FamilyKernel::k_dist(2, 2.0)}) {
    const DistributionSpec spec(k, Vector::Zero(2), SymMatrix(s));
    for (int i = 0; i < 20; ++i) {
      Vector x = Eigen::Vector2d(1.5 * n(g), 1.5 * n(g));
      EXPECT_NEAR(pdf_cg_mixture(spec, x).pdf / pdf_res(spec, x).pdf, 1.0, 1e-6) << k.describe();
    }
  }
}

TEST(CgMixture, TwoPointTexture) {
  const Matrix s = sigma2();
  const double eps = 0.1, a2 = 9.0;
  const DistributionSpec spec(FamilyKernel::eps_contaminated(2, eps, a2), Vector::Zero(2), SymMatrix(s));
  const DistributionSpec g1(FamilyKernel::gaussian(2), Vector::Zero(2), SymMatrix(s));
  const DistributionSpec ga(FamilyKernel::gaussian(2), Vector::Zero(2), SymMatrix(a2 * s));
  for (double t : {0.0, 0.7, 3.0}) {
    const Vector x = Eigen::Vector2d(t, -0.5 * t);
    const double oracle = eps * pdf_res(ga, x).pdf + (1 - eps) * pdf_res(g1, x).pdf;
    EXPECT_NEAR(pdf_cg_mixture(spec, x).pdf / oracle, 1.0, 1e-13);
  }
}

TEST(CgMixture, RejectsNonCompound) {
  const DistributionSpec spec(FamilyKernel::generalized_gaussian(2, 2.0, 1.0), Vector::Zero(2), SymMatrix::identity(2));
  EXPECT_THROW(pdf_cg_mixture(spec, Vector::Zero(2)), std::invalid_argument);
}

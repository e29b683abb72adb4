#include <gtest/gtest.h>

#include <cmath>

#include "ces/distribution.hpp"
#include "ces/matrix_kit.hpp"
#include "ces/slepian_bangs.hpp"

using namespace ces;

namespace {

Matrix test_sigma(int m) {
  Matrix s(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) s(i, j) = std::pow(0.5, std::abs(i - j)) * std::sqrt((1.0 + i) * (1.0 + j));
  return s;
}

CMatrix test_csigma(int m) {
  CMatrix s = test_sigma(m).cast<Complex>();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      s(i, j) += Complex(0.0, 0.3);
      s(j, i) -= Complex(0.0, 0.3);
    }
  return s;
}

// (Re x, Im x) scatter for a complex (S, W) pair
Matrix real_block(const CMatrix& s, const CMatrix& w) {
  const int m = s.rows();
  Matrix r(2 * m, 2 * m);
  r << (s + w).real(), (w - s).imag(), (w + s).imag(), (s - w).real();
  return 0.5 * r;
}

// the same model seen through (Re x, Im x); everything is linear, so Jacobians map directly
ParametricModel real_composite(const ParametricModel& c) {
  const int m = c.dim;
  const bool nc = c.realness == Realness::ComplexNoncircular;
  ParametricModel r;
  r.name = c.name + "-real";
  r.dim = 2 * m;
  r.p = c.p;
  auto omega = [c, nc, m](const Vector& a) { return nc ? c.comega(a) : CMatrix(CMatrix::Zero(m, m)); };
  auto domega = [c, nc, m](const Vector& a) { return nc ? c.dcomega(a) : CMatrix(CMatrix::Zero(m * m, c.p)); };
  r.mu = [c](const Vector& a) { return composite_real_vector(c.cmu(a)); };
  r.dmu = [c, m](const Vector& a) {
    const CMatrix j = c.dcmu(a);
    Matrix out(2 * m, c.p);
    out << j.real(), j.imag();
    return out;
  };
  r.sigma = [c, omega](const Vector& a) { return real_block(c.csigma(a), omega(a)); };
  r.dsigma = [c, domega, m](const Vector& a) {
    const CMatrix js = c.dcsigma(a), jw = domega(a);
    Matrix out(4 * m * m, c.p);
    for (int k = 0; k < c.p; ++k) {
      const CMatrix ds = Eigen::Map<const CMatrix>(js.col(k).data(), m, m);
      const CMatrix dw = Eigen::Map<const CMatrix>(jw.col(k).data(), m, m);
      out.col(k) = vec(real_block(ds, dw));
    }
    return out;
  };
  return r;
}

// mu = a0 1, Sigma = exp(a1) Sigma0; shared also puts a0 into the scatter
ParametricModel mixed_model(int m, bool shared) {
  ParametricModel md;
  md.name = shared ? "shared" : "disjoint";
  md.dim = m;
  md.p = 2;
  const Matrix s0 = test_sigma(m);
  md.mu = [m](const Vector& a) { return Vector(Vector::Constant(m, a(0))); };
  md.dmu = [m](const Vector&) {
    Matrix j = Matrix::Zero(m, 2);
    j.col(0).setOnes();
    return j;
  };
  md.sigma = [s0, shared](const Vector& a) { return Matrix(std::exp(a(1) + (shared ? a(0) : 0.0)) * s0); };
  md.dsigma = [s0, shared, m](const Vector& a) {
    const double e = std::exp(a(1) + (shared ? a(0) : 0.0));
    Matrix j = Matrix::Zero(m * m, 2);
    j.col(1) = e * vec(s0);
    if (shared) j.col(0) = e * vec(s0);
    return j;
  };
  return md;
}

}  // namespace

TEST(Coefficients, GaussianRealAndCircular) {
  const auto r = sb_coefficients(FamilyKernel::gaussian(3));
  EXPECT_NEAR(r.a0, 1.0, 1e-12);
  EXPECT_NEAR(r.a1, 0.5, 1e-12);
  EXPECT_NEAR(r.a2, 0.0, 1e-12);
  const auto c = sb_coefficients(FamilyKernel::gaussian(3, Realness::ComplexCircular));
  EXPECT_NEAR(c.a0, 2.0, 1e-12);
  EXPECT_NEAR(c.a1, 1.0, 1e-12);
  EXPECT_NEAR(c.a2, 0.0, 1e-12);
}

TEST(Fim, GaussianLocationIsInverseScatter) {
  const Matrix s = test_sigma(3);
  const auto md = builtin_model("location-vector", Vector::Zero(3), s);
  const Matrix f = slepian_bangs_fim(md, Eigen::Vector3d(0.5, -1, 2), FamilyKernel::gaussian(3));
  EXPECT_LT((f - s.inverse()).norm(), 1e-12);
  const Matrix c = crb(md, Eigen::Vector3d(0.5, -1, 2), FamilyKernel::gaussian(3), 50);
  EXPECT_LT((c - s / 50.0).norm(), 1e-12);
}

// t-distribution information, written from the known closed forms
TEST(Fim, StudentLocationAndScatter) {
  const int m = 2;
  const double nu = 5.0;
  const Matrix s = test_sigma(m);
  const auto k = FamilyKernel::student(m, nu);
  const Matrix fl = slepian_bangs_fim(builtin_model("location-vector", Vector::Zero(m), s), Vector::Zero(m), k);
  EXPECT_LT((fl - (nu + m) / (nu + m + 2) * s.inverse()).norm(), 1e-9);

  const auto md = builtin_model("scatter-full", Vector::Zero(m), s);
  const Matrix fs = slepian_bangs_fim(md, builtin_alpha("scatter-full", Vector::Zero(m), s), k);
  const Matrix si = s.inverse();
  const Matrix d = duplication(m);
  const Matrix inner = (nu + m) / (2 * (nu + m + 2)) * kron(si, si) - 1.0 / (2 * (nu + m + 2)) * vec(si) * vec(si).transpose();
  const Matrix expect = d.transpose() * inner * d;
  EXPECT_LT((fs - expect).norm() / expect.norm(), 1e-9);
}

TEST(Fim, GaussianScatterFull) {
  for (int m : {1, 2, 3}) {
    const Matrix s = test_sigma(m);
    const auto md = builtin_model("scatter-full", Vector::Zero(m), s);
    const Matrix f = slepian_bangs_fim(md, builtin_alpha("scatter-full", Vector::Zero(m), s), FamilyKernel::gaussian(m));
    const Matrix si = s.inverse();
    const Matrix expect = 0.5 * duplication(m).transpose() * kron(si, si) * duplication(m);
    EXPECT_LT((f - expect).norm() / expect.norm(), 1e-12) << m;
  }
}

TEST(Fim, ScaledIdentityScatter) {
  // d Sigma = Sigma0: a1 m + a2 m^2
  const auto k = FamilyKernel::student(3, 4.0);
  const auto c = sb_coefficients(k);
  const Matrix f = slepian_bangs_fim(builtin_model("scatter-scaled-identity", Vector::Zero(3), test_sigma(3)),
                                     Vector::Ones(1), k);
  EXPECT_NEAR(f(0, 0), 3 * c.a1 + 9 * c.a2, 1e-12);
}

TEST(Fim, PositiveSemidefinite) {
  const std::vector<FamilyKernel> ks = {FamilyKernel::gaussian(3), FamilyKernel::student(3, 2.5),
                                        FamilyKernel::generalized_gaussian(3, 0.4, 1.0), FamilyKernel::k_dist(3, 1.5),
                                        FamilyKernel::eps_contaminated(3, 0.2, 16.0)};
  for (const auto& k : ks) {
    for (bool shared : {false, true}) {
      const Matrix f = slepian_bangs_fim(mixed_model(3, shared), Eigen::Vector2d(0.3, -0.2), k);
      EXPECT_LT((f - f.transpose()).norm(), 1e-14);
      Eigen::SelfAdjointEigenSolver<Matrix> es(f);
      EXPECT_GT(es.eigenvalues().minCoeff(), 0.0) << k.describe();
    }
  }
}

// E[Q phi^2] diverges for the K law with nu <= 1 in dimension >= 2
TEST(Fim, KInfiniteLocationInformation) {
  const auto k = FamilyKernel::k_dist(3, 0.8);
  EXPECT_TRUE(std::isinf(sb_xi(k).xi1));
  EXPECT_TRUE(std::isfinite(sb_xi(k).xi2));
  EXPECT_THROW(slepian_bangs_fim(mixed_model(3, false), Eigen::Vector2d(0, 0), k), NumericalError);
  const Matrix f = slepian_bangs_fim(builtin_model("scatter-scaled-identity", Vector::Zero(3), test_sigma(3)),
                                     Vector::Ones(1), k);
  EXPECT_GT(f(0, 0), 0.0);
  EXPECT_TRUE(std::isfinite(f(0, 0)));
  // the scalar case keeps a finite xi1 down to nu = 3/4
  EXPECT_TRUE(std::isfinite(sb_xi(FamilyKernel::k_dist(1, 0.9)).xi1));
}

TEST(Decoupling, DisjointParametersDecouple) {
  for (const auto& k : {FamilyKernel::gaussian(2), FamilyKernel::student(2, 3.0)}) {
    const auto r = fim_block_decoupling_check(mixed_model(2, false), Eigen::Vector2d(1.0, 0.5), k);
    EXPECT_TRUE(r.decoupled) << r.describe();
    EXPECT_EQ(r.mu_params, std::vector<int>{0});
    EXPECT_EQ(r.sigma_params, std::vector<int>{1});
    EXPECT_LT(r.offblock_norm, 1e-14);
  }
}

TEST(Decoupling, SharedParameterFlagged) {
  const auto r = fim_block_decoupling_check(mixed_model(2, true), Eigen::Vector2d(1.0, 0.5), FamilyKernel::student(2, 3.0));
  EXPECT_FALSE(r.decoupled) << r.describe();
  EXPECT_GT(r.offblock_norm, 0.1);
}

TEST(Model, WrongJacobianRejected) {
  auto md = mixed_model(2, false);
  EXPECT_LT(jacobian_error(md, Eigen::Vector2d(0.1, 0.2)), 1e-7);
  md.dsigma = [](const Vector&) { return Matrix(Matrix::Zero(4, 2)); };
  EXPECT_GT(jacobian_error(md, Eigen::Vector2d(0.1, 0.2)), 0.1);
  EXPECT_THROW(validate_model(md, Eigen::Vector2d(0.1, 0.2)), std::invalid_argument);
  EXPECT_THROW(slepian_bangs_fim(md, Eigen::Vector2d(0.1, 0.2), FamilyKernel::gaussian(2)), std::invalid_argument);
}

TEST(Model, MismatchedKernelRejected) {
  const auto md = mixed_model(2, false);
  EXPECT_THROW(slepian_bangs_fim(md, Eigen::Vector2d(0, 0), FamilyKernel::gaussian(3)), std::invalid_argument);
  EXPECT_THROW(slepian_bangs_fim(md, Eigen::Vector2d(0, 0), FamilyKernel::gaussian(2, Realness::ComplexCircular)),
               std::invalid_argument);
  EXPECT_THROW(builtin_model("nope", Vector::Zero(2), test_sigma(2)), std::invalid_argument);
}

TEST(Crb, SingularInformationNamesDirection) {
  ParametricModel md;
  md.name = "redundant";
  md.dim = 2;
  md.p = 2;
  md.mu = [](const Vector& a) { return Vector(Vector::Constant(2, a(0) + a(1))); };
  md.dmu = [](const Vector&) { return Matrix(Matrix::Ones(2, 2)); };
  md.sigma = [](const Vector&) { return test_sigma(2); };
  md.dsigma = [](const Vector&) { return Matrix(Matrix::Zero(4, 2)); };
  try {
    crb(md, Eigen::Vector2d(0, 0), FamilyKernel::gaussian(2), 10);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("null direction"), std::string::npos);
  }
  EXPECT_THROW(crb(mixed_model(2, false), Eigen::Vector2d(0, 0), FamilyKernel::gaussian(2), 0), std::invalid_argument);
}

TEST(Complex, CircularGaussianLocation) {
  const CMatrix s = test_csigma(2);
  const auto md = builtin_model("location-vector", Vector::Zero(2), test_sigma(2), Realness::ComplexCircular);
  // rebuild with the complex scatter
  auto m2 = md;
  m2.csigma = [s](const Vector&) { return s; };
  const Matrix f = slepian_bangs_fim(m2, Eigen::Vector2d(0.2, 0.1), FamilyKernel::gaussian(2, Realness::ComplexCircular));
  const Matrix expect = 2.0 * s.inverse().real();
  EXPECT_LT((f - expect).norm(), 1e-12);
}

// complex models must carry the same information as their (Re, Im) composite
TEST(Complex, AgreesWithRealComposite) {
  const int m = 2;
  const CMatrix s = test_csigma(m);
  CMatrix w(m, m);
  w << Complex(0.3, 0.1), Complex(0.1, -0.2), Complex(0.1, -0.2), Complex(-0.2, 0.4);
  for (auto realness : {Realness::ComplexCircular, Realness::ComplexNoncircular}) {
    for (const auto& base : {FamilyKernel::gaussian(m), FamilyKernel::student(m, 3.0), FamilyKernel::k_dist(m, 1.5),
                             FamilyKernel::generalized_gaussian(m, 0.7, 1.0)}) {
      const auto k = base.with_realness(realness);
      ParametricModel md;
      md.name = "cplx";
      md.dim = m;
      md.p = 3;
      md.realness = realness;
      md.cmu = [](const Vector& a) {
        CVector v(2);
        v << Complex(a(0), a(1)), Complex(a(1), 0.0);
        return v;
      };
      md.dcmu = [](const Vector&) {
        CMatrix j = CMatrix::Zero(2, 3);
        j(0, 0) = 1.0;
        j(0, 1) = Complex(0.0, 1.0);
        j(1, 1) = 1.0;
        return j;
      };
      md.csigma = [s](const Vector& a) { return CMatrix(a(2) * s); };
      md.dcsigma = [s](const Vector&) {
        CMatrix j = CMatrix::Zero(4, 3);
        j.col(2) = Eigen::Map<const Eigen::VectorXcd>(s.data(), 4);
        return j;
      };
      md.comega = [w](const Vector& a) { return CMatrix(a(2) * w); };
      md.dcomega = [w](const Vector&) {
        CMatrix j = CMatrix::Zero(4, 3);
        j.col(2) = Eigen::Map<const Eigen::VectorXcd>(w.data(), 4);
        return j;
      };
      const Vector alpha = Eigen::Vector3d(0.1, -0.3, 1.2);
      const ParametricModel rm = real_composite(md);
      const ComplexSpec spec(k, md.cmu(alpha), md.csigma(alpha),
                             realness == Realness::ComplexNoncircular ? std::optional<CMatrix>(md.comega(alpha))
                                                                     : std::nullopt);
      const DistributionSpec rs = composite_real_spec(spec);
      ASSERT_LT((rs.sigma.matrix() - rm.sigma(alpha)).norm(), 1e-12);
      const Matrix fc = slepian_bangs_fim(md, alpha, k);
      const Matrix fr = slepian_bangs_fim(rm, alpha, rs.kernel);
      EXPECT_LT((fc - fr).norm() / fr.norm(), 1e-8) << k.describe();
    }
  }
}

TEST(Builtin, NamesAndAlphaRoundTrip) {
  const Matrix s = test_sigma(3);
  const Vector mu = Eigen::Vector3d(1, 2, 3);
  for (const auto& name : builtin_model_names()) {
    const auto md = builtin_model(name, mu, s);
    const Vector a = builtin_alpha(name, mu, s);
    ASSERT_EQ(a.size(), md.p) << name;
    EXPECT_LT((md.sigma(a) - s).norm(), 1e-14) << name;
    if (name != "location-scalar") EXPECT_LT((md.mu(a) - mu).norm(), 1e-14) << name;
    EXPECT_LT(jacobian_error(md, a), 1e-7) << name;
  }
}

#include <gtest/gtest.h>

#include "ces/distribution.hpp"
#include "ces/kernels.hpp"
#include "ces/matrix_kit.hpp"
#include "ces/sampler.hpp"

using namespace ces;

namespace {

struct Data {
  DataMatrix x;
  Vector mu;
  Matrix chol;
  Vector w;
};

Data make(int n, int m) {
  Matrix s(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) s(i, j) = std::pow(0.5, std::abs(i - j));
  const DistributionSpec spec(FamilyKernel::student(m, 4.0), Vector::LinSpaced(m, -1.0, 1.0), SymMatrix(s));
  Data d{sample_res(spec, n, 5).data, spec.mu, cholesky_sqrt(spec.sigma), Vector(n)};
  for (int i = 0; i < n; ++i) d.w(i) = 1.0 / (1.0 + 0.01 * (i % 7));
  return d;
}

}  // namespace

// sizes around the block length exercise the ragged last block
class KernelsAgree : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(KernelsAgree, ParallelMatchesSerial) {
  const auto [n, m] = GetParam();
  const Data d = make(n, m);
  const Vector q0 = kernels::serial::mahalanobis_batch(d.x, d.mu, d.chol);
  const Vector q1 = kernels::mahalanobis_batch(d.x, d.mu, d.chol);
  EXPECT_LE((q0 - q1).cwiseAbs().maxCoeff(), 1e-12 * q0.cwiseAbs().maxCoeff());
  const Matrix s0 = kernels::serial::weighted_scatter(d.x, d.mu, d.w);
  const Matrix s1 = kernels::weighted_scatter(d.x, d.mu, d.w);
  EXPECT_LE((s0 - s1).norm(), 1e-12 * s0.norm());
  EXPECT_LE((s1 - s1.transpose()).norm(), 1e-14 * s1.norm());
  const Vector v0 = kernels::serial::weighted_sum(d.x, d.w);
  const Vector v1 = kernels::weighted_sum(d.x, d.w);
  EXPECT_LE((v0 - v1).norm(), 1e-12 * std::max(1.0, v0.norm()));
}

INSTANTIATE_TEST_SUITE_P(Sizes, KernelsAgree,
                         ::testing::Values(std::pair{1, 1}, std::pair{7, 3}, std::pair{kernels::kBlockRows, 2},
                                           std::pair{kernels::kBlockRows + 1, 4}, std::pair{5000, 8}));

TEST(Kernels, SerialAgainstNaiveLoops) {
  const Data d = make(300, 3);
  const Matrix sinv = (d.chol * d.chol.transpose()).inverse();
  const Vector q = kernels::serial::mahalanobis_batch(d.x, d.mu, d.chol);
  Matrix s = Matrix::Zero(3, 3);
  Vector v = Vector::Zero(3);
  for (int i = 0; i < 300; ++i) {
    const Vector r = d.x.row(i).transpose() - d.mu;
    EXPECT_NEAR(q(i), r.dot(sinv * r), 1e-10 * std::max(1.0, q(i)));
    s += d.w(i) * r * r.transpose();
    v += d.w(i) * d.x.row(i).transpose();
  }
  EXPECT_LT((kernels::serial::weighted_scatter(d.x, d.mu, d.w) - s).norm(), 1e-10 * s.norm());
  EXPECT_LT((kernels::serial::weighted_sum(d.x, d.w) - v).norm(), 1e-10 * v.norm());
}

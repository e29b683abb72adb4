#pragma once

// Exact samplers built on the stochastic representations
//   x = mu + sqrt(Q) A u               (real and circular complex, A A^H = Sigma)
//   x = mu + sqrt(tau) n                (compound Gaussian)
//   x = mu + sqrt(Q) A (D1 u + D2 u*)   (noncircular complex)
// Every batch is a pure function of (spec, n, seed, stream_id).

#include <cstdint>

#include "ces/distribution.hpp"
#include "ces/rng.hpp"

namespace ces {

struct SampleBatch {
  DataMatrix data;
  DistributionSpec spec;
  std::uint64_t seed;
  std::uint64_t stream_id;
};

struct ComplexSampleBatch {
  CDataMatrix data;
  ComplexSpec spec;
  std::uint64_t seed;
  std::uint64_t stream_id;
};

/// Auto takes the direct mu + A n path for Gaussian kernels; Generic always goes through Q and u.
enum class SampleRoute { Auto, Generic };

/// `count` rows uniformly distributed on the unit sphere of R^m.
DataMatrix sample_sphere(int m, int count, Philox4x32& eng);

/// `count` rows uniformly distributed on the unit sphere of C^m.
CDataMatrix sample_complex_sphere(int m, int count, Philox4x32& eng);

SampleBatch sample_res(const DistributionSpec& spec, int n, std::uint64_t seed, std::uint64_t stream_id = 0,
                       SampleRoute route = SampleRoute::Auto);

/// Texture times Gaussian speckle. Throws std::invalid_argument for kernels without a texture.
SampleBatch sample_cg(const DistributionSpec& spec, int n, std::uint64_t seed, std::uint64_t stream_id = 0);

/// Circular or noncircular complex draws depending on spec.omega.
ComplexSampleBatch sample_nc_ces(const ComplexSpec& spec, int n, std::uint64_t seed, std::uint64_t stream_id = 0);

/// Compound-Gaussian complex draws, x = mu + sqrt(tau) n with n ~ CN(0, Sigma). Circular only.
ComplexSampleBatch sample_ccg(const ComplexSpec& spec, int n, std::uint64_t seed, std::uint64_t stream_id = 0);

/// Angular central Gaussian: n / |n| with n ~ N(0, Sigma).
DataMatrix sample_acg(const SymMatrix& sigma, int n, std::uint64_t seed, std::uint64_t stream_id = 0);

/// Rows x -> B x + b. B is k x m with full row rank; k < m (a projection) is only allowed
/// for compound-Gaussian kernels, whose marginals stay in the same family.
SampleBatch affine_transform(const SampleBatch& batch, const Matrix& b_mat, const Vector& b_vec);

/// The law of B x + b for x ~ spec, with the same restrictions as affine_transform.
DistributionSpec affine_spec(const DistributionSpec& spec, const Matrix& b_mat, const Vector& b_vec);

}  // namespace ces

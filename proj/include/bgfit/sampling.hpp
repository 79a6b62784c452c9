#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bgfit/model.hpp"

namespace bgfit {

inline constexpr std::uint64_t kDefaultSeed = 20240101;

// Identifies one random stream. The generator state is a pure function of
// (base_seed, stream_id), so replicates can run in any order or on any
// thread and still see the same numbers.
struct SeedSpec {
  std::uint64_t base_seed = kDefaultSeed;
  std::uint64_t stream_id = 0;
};

// xoshiro256** keyed through splitmix64. Variate algorithms are implemented
// here rather than taken from <random> so that output is identical across
// standard libraries.
class RandomStream {
 public:
  explicit RandomStream(SeedSpec seed);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  // Gamma(shape, 1) on the log scale; stays finite for tiny shapes.
  double log_gamma_variate(double shape);
  double beta(double a, double b);
  Delay geometric(double theta);

 private:
  std::array<std::uint64_t, 4> s_;
};

std::vector<double> sample_beta(const BetaLaw& law, SeedSpec seed, std::size_t count);

// Compound draw: theta ~ Beta(alpha, beta), then X | theta ~ Geometric(theta).
std::vector<Delay> sample_bg(const BetaGeometricLaw& law, SeedSpec seed, std::size_t count);

// Inversion: floor(ln U / ln(1 - theta)); all zeros when theta == 1.
std::vector<Delay> sample_geometric(const GeometricLaw& law, SeedSpec seed, std::size_t count);

}  // namespace bgfit

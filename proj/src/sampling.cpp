#include "bgfit/sampling.hpp"

#include <cmath>
#include <limits>

#include "bgfit/errors.hpp"

namespace bgfit {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Delays beyond this are clamped; only reachable for theta ~ 1e-300.
constexpr Delay kMaxDelay = Delay{1} << 62;

void require_count(std::size_t count) {
  if (count == 0) throw DomainError("sample count must be >= 1");
}

}  // namespace

RandomStream::RandomStream(SeedSpec seed) {
  std::uint64_t base = seed.base_seed;
  std::uint64_t stream = seed.stream_id ^ 0xD1B54A32D192ED03ULL;
  std::uint64_t key = splitmix64(base) ^ rotl(splitmix64(stream), 17);
  for (auto& word : s_) word = splitmix64(key);
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RandomStream::uniform() {
  // 53 random bits shifted by half an ulp: never 0, never 1.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
  // Marsaglia polar method; the spare deviate is discarded to keep the
  // stream position a simple function of the number of calls.
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double RandomStream::log_gamma_variate(double shape) {
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a)
    const double boosted = log_gamma_variate(shape + 1.0);
    return boosted + std::log(uniform()) / shape;
  }
  // Marsaglia-Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z;
    double v;
    do {
      z = normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double z2 = z * z;
    if (u < 1.0 - 0.0331 * z2 * z2) return std::log(d * v);
    if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

double RandomStream::beta(double a, double b) {
  const double lx = log_gamma_variate(a);
  const double ly = log_gamma_variate(b);
  // x / (x + y) = 1 / (1 + exp(ly - lx))
  return 1.0 / (1.0 + std::exp(ly - lx));
}

Delay RandomStream::geometric(double theta) {
  if (theta >= 1.0) return 0;
  if (theta <= 0.0) return kMaxDelay;
  const double draw = std::floor(std::log(uniform()) / std::log1p(-theta));
  if (!(draw < static_cast<double>(kMaxDelay))) return kMaxDelay;
  return static_cast<Delay>(draw);
}

std::vector<double> sample_beta(const BetaLaw& law, SeedSpec seed, std::size_t count) {
  require_count(count);
  RandomStream rng(seed);
  std::vector<double> out(count);
  for (auto& v : out) v = rng.beta(law.alpha(), law.beta());
  return out;
}

std::vector<Delay> sample_bg(const BetaGeometricLaw& law, SeedSpec seed, std::size_t count) {
  require_count(count);
  RandomStream rng(seed);
  std::vector<Delay> out(count);
  for (auto& v : out) v = rng.geometric(rng.beta(law.alpha(), law.beta()));
  return out;
}

std::vector<Delay> sample_geometric(const GeometricLaw& law, SeedSpec seed, std::size_t count) {
  require_count(count);
  RandomStream rng(seed);
  std::vector<Delay> out(count);
  for (auto& v : out) v = rng.geometric(law.theta());
  return out;
}

}  // namespace bgfit

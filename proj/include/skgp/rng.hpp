#pragma once

#include <array>
#include <cstdint>
#include <string_view>

// Counter-based random number generation. Every draw is a pure function of
// (seed, stream, index), so generation is random-access, order-independent,
// and bit-identical across platforms and thread counts. Archived seeds
// reproduce the same streams within a generator version.
namespace skgp::rng {

// Recorded in sidecars, bundles and manifests. Bump on any change to the
// draw path (cipher, uniform mapping, or normal inversion).
inline constexpr std::string_view kGeneratorId = "philox4x32-10.as241.v1";

// One Philox 4x32-10 block: 128 counter bits -> 128 output bits under a
// 64-bit key.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint64_t ctr_hi,
                                        std::uint64_t ctr_lo);

// Raw 64 uniform bits for lane (seed, stream, index).
std::uint64_t uniform_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Uniform double strictly inside (0, 1).
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Standard normal draw via the inverse CDF.
double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Standard normal quantile function (Wichura's AS 241, PPND16 variant).
// Accurate to roughly 1e-15 for p in (0, 1).
double inverse_normal_cdf(double p);

// Derives an independent child seed, e.g. one per stacked model or per
// benchmark replicate. Distinct tags give unrelated streams.
std::uint64_t child_seed(std::uint64_t root, std::uint64_t tag);

// Sequential view over one (seed, stream) lane.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t bits() { return uniform_bits(seed_, stream_, index_++); }
  double uniform01() { return rng::uniform01(seed_, stream_, index_++); }
  double normal() { return rng::normal(seed_, stream_, index_++); }

  // Uniform integer in [0, bound), bound >= 1, by rejection sampling.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
};

}  // namespace skgp::rng

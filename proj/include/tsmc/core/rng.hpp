#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace tsmc {

/// Coordinates of an independent random stream. Streams are derived by
/// hashing the four words, so results never depend on which worker thread
/// consumes which stream.
struct RngKey {
  std::uint64_t seed = 0;
  std::uint64_t stage = 0;
  std::uint64_t index = 0;
  std::uint64_t substep = 0;

  /// A key for a nested purpose (e.g. the particle filter run behind a proposal).
  RngKey child(std::uint64_t tag) const noexcept;

  friend bool operator==(const RngKey&, const RngKey&) = default;
};

// Reserved index / substep values.
inline constexpr std::uint64_t kSwarmIndex = std::numeric_limits<std::uint64_t>::max();
namespace substep {
inline constexpr std::uint64_t kStage0Draw = 1ULL << 40;
inline constexpr std::uint64_t kStage0Eval = (1ULL << 40) + 1;
inline constexpr std::uint64_t kResample = (1ULL << 40) + 2;
inline constexpr std::uint64_t kPartition = (1ULL << 40) + 3;
inline constexpr std::uint64_t kInitResample = (1ULL << 40) + 4;
inline constexpr std::uint64_t kSimulate = (1ULL << 40) + 5;
}  // namespace substep

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// xoshiro256++ seeded from an RngKey. Satisfies UniformRandomBitGenerator
/// so it can drive <random> distributions where convenient.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(const RngKey& key) noexcept;
  explicit Rng(std::uint64_t seed) noexcept : Rng(RngKey{seed, 0, 0, 0}) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0,1) with 52-bit resolution.
  double uniform() noexcept;
  double normal() noexcept;
  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

  void fill_bits(std::span<std::uint64_t> out) noexcept;
  /// Standard normals through the dispatched Box-Muller kernel.
  void fill_normal(std::span<double> out);

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Maps 64 random bits to (0,1): ((b >> 12) + 0.5) * 2^-52. Shared by the
/// scalar and vector kernels so both see identical uniforms.
inline double bits_to_open_uniform(std::uint64_t b) noexcept {
  return (static_cast<double>(b >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace tsmc

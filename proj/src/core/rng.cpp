#include "tsmc/core/rng.hpp"

#include <vector>

#include "tsmc/simd/kernels.hpp"

namespace tsmc {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

std::uint64_t mix(std::uint64_t h, std::uint64_t word) noexcept {
  std::uint64_t s = h ^ (word + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  return splitmix64(s);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RngKey RngKey::child(std::uint64_t tag) const noexcept {
  std::uint64_t h = mix(mix(0x6a09e667f3bcc909ULL, seed), stage);
  return RngKey{mix(h, tag), stage, index, substep ^ rotl(tag, 17)};
}

Rng::Rng(const RngKey& key) noexcept {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  h = mix(h, key.seed);
  h = mix(h, key.stage);
  h = mix(h, key.index);
  h = mix(h, key.substep);
  for (auto& w : s_) w = splitmix64(h);
}

Rng::result_type Rng::operator()() noexcept {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() noexcept { return bits_to_open_uniform((*this)()); }

double Rng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  std::uint64_t bits[2] = {(*this)(), (*this)()};
  double out[2];
  simd::kernels().box_muller(bits, 1, out);
  spare_ = out[1];
  has_spare_ = true;
  return out[0];
}

void Rng::fill_bits(std::span<std::uint64_t> out) noexcept {
  for (auto& b : out) b = (*this)();
}

void Rng::fill_normal(std::span<double> out) {
  const std::size_t pairs = (out.size() + 1) / 2;
  thread_local std::vector<std::uint64_t> bits;
  thread_local std::vector<double> tmp;
  bits.resize(2 * pairs);
  fill_bits(bits);
  if (out.size() % 2 == 0) {
    simd::kernels().box_muller(bits.data(), pairs, out.data());
  } else {
    tmp.resize(2 * pairs);
    simd::kernels().box_muller(bits.data(), pairs, tmp.data());
    std::copy_n(tmp.begin(), out.size(), out.begin());
  }
}

}  // namespace tsmc

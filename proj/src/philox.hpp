#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace wsarma {

/// Philox4x32-10 block function (Salmon et al., SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                                std::array<std::uint32_t, 2> key) noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

/// Counter-based 64-bit engine: the seed is the Philox key, the state is a
/// 64-bit block counter, each block yields two outputs (output 2c and 2c+1
/// come from block c). Satisfies
/// UniformRandomBitGenerator so it plugs into standard distributions.
class PhiloxEngine {
 public:
  using result_type = std::uint64_t;

  explicit PhiloxEngine(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (lane_ == kOutputs) refill();
    return buf_[lane_++];
  }

  void discard(std::uint64_t z) noexcept {
    for (; z > 0 && lane_ < kOutputs; --z) ++lane_;
    counter_ += (z / kOutputs) * kBlocks;
    if (z % kOutputs != 0) {
      refill();
      lane_ = static_cast<int>(z % kOutputs);
    }
  }

 private:
  static constexpr int kBlocks = 16;
  static constexpr int kOutputs = 2 * kBlocks;

  // Runs kBlocks consecutive counters side by side so the rounds vectorize.
  void refill() noexcept {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    std::uint32_t c0[kBlocks], c1[kBlocks], c2[kBlocks], c3[kBlocks];
    for (int b = 0; b < kBlocks; ++b) {
      const std::uint64_t block = counter_ + static_cast<std::uint64_t>(b);
      c0[b] = static_cast<std::uint32_t>(block);
      c1[b] = static_cast<std::uint32_t>(block >> 32);
      c2[b] = static_cast<std::uint32_t>(stream_);
      c3[b] = static_cast<std::uint32_t>(stream_ >> 32);
    }
    std::uint32_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k0 += 0x9E3779B9u;
        k1 += 0xBB67AE85u;
      }
#pragma GCC unroll 1
      for (int b = 0; b < kBlocks; ++b) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * c0[b];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c2[b];
        const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1[b] ^ k0;
        const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3[b] ^ k1;
        c1[b] = static_cast<std::uint32_t>(p1);
        c3[b] = static_cast<std::uint32_t>(p0);
        c0[b] = n0;
        c2[b] = n2;
      }
    }
    for (int b = 0; b < kBlocks; ++b) {
      buf_[2 * b] = (std::uint64_t{c1[b]} << 32) | c0[b];
      buf_[2 * b + 1] = (std::uint64_t{c3[b]} << 32) | c2[b];
    }
    counter_ += kBlocks;
    lane_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, kOutputs> buf_{};
  int lane_ = kOutputs;
};

/// Stateless 64-bit derivation: hashes `index` under `key` with a domain tag.
inline std::uint64_t derive_seed(std::uint64_t key, std::uint64_t index, std::uint32_t tag) noexcept {
  const auto out = philox4x32({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), tag,
                               0x85A308D3u},
                              {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)});
  return (std::uint64_t{out[1]} << 32) | out[0];
}

}  // namespace wsarma

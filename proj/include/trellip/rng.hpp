#ifndef TRELLIP_RNG_HPP
#define TRELLIP_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace trellip {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Output is a pure function of (key, counter), so streams with distinct keys
// are independent and a fixed seed reproduces the sequence bit-exactly on
// any platform.
class Philox {
 public:
  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0, 0, static_cast<std::uint32_t>(stream),
             static_cast<std::uint32_t>(stream >> 32)} {}

  std::uint64_t next_u64() noexcept {
    if (pos_ >= 4) refill();
    const std::uint64_t lo = block_[pos_];
    const std::uint64_t hi = block_[pos_ + 1];
    pos_ += 2;
    return (hi << 32) | lo;
  }

  // Uniform on the open interval (0,1): 53-bit mantissa shifted by half an
  // ulp, so neither endpoint is ever returned.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on (lo, hi); requires lo < hi, both finite.
  double uniform(double lo, double hi) noexcept {
    return lo + uniform() * (hi - lo);
  }

 private:
  static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
  }

  void refill() noexcept {
    std::array<std::uint32_t, 4> x = ctr_;
    std::uint32_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2511F53u, x[0], hi0, lo0);
      mulhilo(0xCD9E8D57u, x[2], hi1, lo1);
      x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    block_ = x;
    pos_ = 0;
    if (++ctr_[0] == 0 && ++ctr_[1] == 0) ++ctr_[2];
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 4;
};

// Deterministic per-chain seed derivation (SplitMix64 finalizer). Used to
// fan a user seed out to k parallel chains without overlapping streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) noexcept {
  std::uint64_t z = seed + (k + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace trellip

#endif  // TRELLIP_RNG_HPP

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace cbf {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Output is a pure function of (counter, key), which is what lets Brownian
/// increments be addressed by (seed, mode, interval) with no shared state.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    ctr = round(ctr, key);
    for (int i = 1; i < 10; ++i) {
      key[0] += kW0;
      key[1] += kW1;
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static Counter round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = std::uint64_t(kM0) * c[0];
    const std::uint64_t p1 = std::uint64_t(kM1) * c[2];
    const auto hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    const auto hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Uniform on the open interval (0, 1) from two 32-bit words (52 bits used,
/// so the largest value 1 - 2^-53 is still representable).
inline double uniform_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((std::uint64_t(hi) << 32) | lo) >> 12;
  return (double(bits) + 0.5) * 0x1.0p-52;
}

/// A pair of independent standard normals (Box-Muller) for one counter value.
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const Philox4x32::Counter ctr{std::uint32_t(a), std::uint32_t(a >> 32), std::uint32_t(b), std::uint32_t(b >> 32)};
  const Philox4x32::Key key{std::uint32_t(seed), std::uint32_t(seed >> 32)};
  const auto w = Philox4x32::generate(ctr, key);
  const double u1 = uniform_open(w[0], w[1]);
  const double u2 = uniform_open(w[2], w[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

/// SplitMix64 finalizer, used to derive per-sample seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix_seed(master ^ mix_seed(index + 0x51ED270B27A3F7C1ull));
}

/// Sequential stream of standard normals on top of the counter-based generator.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const auto pair = normal_pair(seed_, counter_++, stream_);
    spare_ = pair[1];
    has_spare_ = true;
    return pair[0];
  }

  /// Uniform on (0, 1), consuming one counter value.
  double uniform() {
    const Philox4x32::Counter ctr{std::uint32_t(counter_), std::uint32_t(counter_ >> 32), std::uint32_t(stream_),
                                  std::uint32_t(~(stream_ >> 32))};
    ++counter_;
    const auto w = Philox4x32::generate(ctr, {std::uint32_t(seed_), std::uint32_t(seed_ >> 32)});
    return uniform_open(w[0], w[1]);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cbf

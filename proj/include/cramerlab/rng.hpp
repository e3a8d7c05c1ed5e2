#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>

namespace cramerlab {

/// Philox4x32-10 block function (Salmon et al., SC'11).  Stateless: output is a
/// pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

inline std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Names one reproducible substream: (seed, stream_index) is the Philox key and
/// the upper half of the counter; draws are addressed by the lower half.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;

  /// Derived substream; children of distinct parents or indices do not collide
  /// in practice (64-bit hash).
  RngStream child(std::uint64_t index) const noexcept {
    return {seed, splitmix64(stream_index ^ splitmix64(index + 0x632BE59BD9B4E019ull))};
  }

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// Sequential cursor over one RngStream.  Cheap to copy; `seek` jumps in O(1).
class RngEngine {
 public:
  explicit RngEngine(RngStream stream, std::uint64_t first_draw = 0) noexcept
      : stream_(stream), draw_(first_draw) {}

  void seek(std::uint64_t draw) noexcept { draw_ = draw; }
  std::uint64_t position() const noexcept { return draw_; }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t block_index = draw_ >> 1;
    if (!cached_ || cached_block_ != block_index) {
      const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_index),
                                    static_cast<std::uint32_t>(block_index >> 32),
                                    static_cast<std::uint32_t>(stream_.stream_index),
                                    static_cast<std::uint32_t>(stream_.stream_index >> 32)};
      const Philox4x32::Key key{static_cast<std::uint32_t>(stream_.seed),
                                static_cast<std::uint32_t>(stream_.seed >> 32)};
      block_ = Philox4x32::block(ctr, key);
      cached_block_ = block_index;
      cached_ = true;
    }
    const unsigned half = static_cast<unsigned>(draw_ & 1u) * 2u;
    ++draw_;
    return (std::uint64_t{block_[half]} << 32) | block_[half + 1];
  }

  /// Uniform on the open interval (0, 1); 53-bit resolution.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Two independent standard normals (Box-Muller); consumes exactly two draws.
  std::pair<double, double> normal_pair() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  /// Fills `out` with standard normals; consumes 2*ceil(size/2) draws.
  void fill_normal(std::span<double> out) noexcept {
    std::size_t i = 0;
    for (; i + 1 < out.size(); i += 2) {
      auto [a, b] = normal_pair();
      out[i] = a;
      out[i + 1] = b;
    }
    if (i < out.size()) out[i] = normal_pair().first;
  }

  static constexpr std::uint64_t normal_draws(std::size_t count) noexcept {
    return 2 * ((count + 1) / 2);
  }

 private:
  RngStream stream_;
  std::uint64_t draw_;
  std::uint64_t cached_block_ = 0;
  bool cached_ = false;
  Philox4x32::Counter block_{};
};

}  // namespace cramerlab

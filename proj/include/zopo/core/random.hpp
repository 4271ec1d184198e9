#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace zopo {

/// Identifies a random stream: a master seed plus a path such as
/// run -> iteration -> trial. Equal specs give bit-identical streams.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> stream_path;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

inline SeedSpec derive_stream(const SeedSpec& seed, std::uint64_t child) {
  SeedSpec out = seed;
  out.stream_path.push_back(child);
  return out;
}

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer (Stafford mix 13).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// 64-bit stream key: the master seed and each path element are folded in
/// through the SplitMix64 finalizer.
inline std::uint64_t stream_key(const SeedSpec& seed) {
  std::uint64_t k = detail::mix64(seed.master_seed + detail::kGolden);
  for (std::uint64_t child : seed.stream_path) {
    k = detail::mix64(k ^ detail::mix64((child + 1) * 0xD1B54A32D192ED03ULL));
  }
  return k;
}

namespace detail {

// Doornik's ZIGNOR tables: 128 blocks, tail start R, block area V.
struct ZigguratTables {
  static constexpr int kBlocks = 128;
  static constexpr double kR = 3.442619855899;
  static constexpr double kV = 9.91256303526217e-3;

  std::array<double, kBlocks + 1> x{};
  std::array<double, kBlocks> ratio{};

  ZigguratTables() {
    double f = std::exp(-0.5 * kR * kR);
    x[0] = kV / f;
    x[1] = kR;
    x[kBlocks] = 0.0;
    for (int i = 2; i < kBlocks; ++i) {
      x[i] = std::sqrt(-2.0 * std::log(kV / x[i - 1] + f));
      f = std::exp(-0.5 * x[i] * x[i]);
    }
    for (int i = 0; i < kBlocks; ++i) ratio[i] = x[i + 1] / x[i];
  }
};

inline const ZigguratTables& ziggurat_tables() {
  static const ZigguratTables tables;
  return tables;
}

}  // namespace detail

/// Counter-based generator: the i-th output is mix64(key + (i + 1) * golden),
/// i.e. SplitMix64 started at the stream key. Normals use the ziggurat method
/// so the sequence is independent of the standard library in use.
class RandomStream {
 public:
  explicit RandomStream(const SeedSpec& seed) : state_(stream_key(seed)), zig_(&detail::ziggurat_tables()) {}
  explicit RandomStream(std::uint64_t key) : state_(key), zig_(&detail::ziggurat_tables()) {}

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() { return to_unit(next_u64()); }

  double normal() {
    const auto& zig = *zig_;
    for (;;) {
      const std::uint64_t bits = next_u64();
      const double u = 2.0 * to_unit(bits) - 1.0;
      const unsigned i = static_cast<unsigned>(bits & 0x7F);
      if (std::abs(u) < zig.ratio[i]) return u * zig.x[i];
      if (i == 0) return tail(u < 0.0);
      const double x = u * zig.x[i];
      const double f0 = std::exp(-0.5 * (zig.x[i] * zig.x[i] - x * x));
      const double f1 = std::exp(-0.5 * (zig.x[i + 1] * zig.x[i + 1] - x * x));
      if (f1 + uniform() * (f0 - f1) < 1.0) return x;
    }
  }

 private:
  static double to_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  double tail(bool negative) {
    constexpr double r = detail::ZigguratTables::kR;
    double x = 0.0;
    double y = 0.0;
    do {
      x = std::log(uniform()) / r;
      y = std::log(uniform());
    } while (-2.0 * y < x * x);
    return negative ? x - r : r - x;
  }

  std::uint64_t state_;
  const detail::ZigguratTables* zig_;
};

}  // namespace zopo

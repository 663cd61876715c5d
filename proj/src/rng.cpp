#include "reslat/rng.hpp"

#include <cmath>

namespace reslat {

namespace philox {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                      std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

inline void round_once(std::array<std::uint32_t, 4>& c,
                       const std::array<std::uint32_t, 2>& k) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mul_hi_lo(kMult0, c[0], lo0, hi0);
  mul_hi_lo(kMult1, c[2], lo1, hi1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                   std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    round_once(counter, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

}  // namespace philox

NoiseStream::NoiseStream(std::uint64_t seed, std::uint32_t trajectory)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      trajectory_(trajectory) {}

Eigen::Vector2d NoiseStream::normal_pair(std::uint32_t node, std::uint32_t step,
                                         std::uint32_t slot) const {
  const auto words = philox::block({trajectory_, node, step, slot}, key_);
  const std::uint64_t a =
      (static_cast<std::uint64_t>(words[1]) << 32) | words[0];
  const std::uint64_t b =
      (static_cast<std::uint64_t>(words[3]) << 32) | words[2];
  // u1 in (0,1] keeps the log finite, u2 in [0,1).
  const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * M_PI * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace reslat

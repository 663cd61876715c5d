#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Dense>

namespace reslat {

// Philox 4x32-10 block cipher used as a counter-based generator
// (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3", SC 2011).
namespace philox {

std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                   std::array<std::uint32_t, 2> key);

}  // namespace philox

// Reproducible Gaussian stream for one trajectory.
//
// Every draw is addressed by (trajectory, node, step, slot); the 64-bit
// experiment seed is the cipher key. Draws with distinct addresses are
// independent, so trajectories can run in parallel and any subset of them
// can be replayed bit-exactly.
//
// Slot conventions used by the steppers:
//   full rotating step      slot 0
//   exact OU step           slot 0 (or the slot passed by the caller)
//   effective Strang step   slots 0 and 1 (the two OU half-steps)
//   initial-condition draws step = kInitStep, slot 0
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint32_t trajectory);

  // Two independent standard normals for the given address.
  Eigen::Vector2d normal_pair(std::uint32_t node, std::uint32_t step,
                              std::uint32_t slot) const;

  std::uint32_t trajectory() const { return trajectory_; }

  static constexpr std::uint32_t kInitStep = 0xffffffffu;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t trajectory_;
};

}  // namespace reslat

#pragma once

// Counter-based random streams for reproducible parallel Monte Carlo.
// Philox4x32-10 (Salmon et al., SC 2011) keyed by the master seed; the
// counter encodes (path, step, block), so any draw is addressable without
// sequential state and parallel scheduling cannot reorder the streams.

#include <array>
#include <cstddef>
#include <cstdint>

namespace msbif {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Inverse standard normal CDF (Wichura's AS241, |error| well below 1e-9).
double inverse_normal_cdf(double p);

class PathNoise {
public:
  PathNoise(std::uint64_t master_seed, std::uint64_t path_index)
      : key_{static_cast<std::uint32_t>(master_seed),
             static_cast<std::uint32_t>(master_seed >> 32)},
        path_lo_(static_cast<std::uint32_t>(path_index)),
        path_hi_(static_cast<std::uint32_t>(path_index >> 32)) {}

  // Uniform in (0,1): draw `slot` of step `step_index`.
  double uniform(std::uint32_t step_index, std::uint32_t slot) const;

  // Standard normal via inverse CDF of the matching uniform.
  double normal(std::uint32_t step_index, std::uint32_t slot) const {
    return inverse_normal_cdf(uniform(step_index, slot));
  }

  void normals(std::uint32_t step_index, double* out, std::size_t count) const;

  // Step index reserved for initial-condition draws.
  static constexpr std::uint32_t kInitStep = 0xFFFFFFFFu;

private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t path_lo_, path_hi_;
};

}  // namespace msbif

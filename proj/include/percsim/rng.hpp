#pragma once

#include <cstdint>
#include <random>

namespace percsim {

using Rng = std::mt19937_64;

/// Independent random streams per (robot, subsystem). Toggling one subsystem never
/// shifts the draws of another.
enum class Subsystem : std::uint32_t {
  Vio = 1,
  Detector = 2,
  Misclassification = 3,
  Mislocalization = 4,
  Network = 5,
};

/// Deterministic substream derived from the master seed.
Rng make_stream(std::uint64_t master_seed, int robot_id, Subsystem subsystem);

}  // namespace percsim

#include "percsim/rng.hpp"

namespace percsim {

Rng make_stream(std::uint64_t master_seed, int robot_id, Subsystem subsystem) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                    static_cast<std::uint32_t>(master_seed >> 32), static_cast<std::uint32_t>(robot_id),
                    static_cast<std::uint32_t>(subsystem), 0x70657263u};
  return Rng(seq);
}

}  // namespace percsim

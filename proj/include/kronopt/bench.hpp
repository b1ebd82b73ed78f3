#pragma once

#include <cstdint>
#include <string>

#include "kronopt/network.hpp"

namespace kronopt {

// Three-area 73-bus RTS-96-style system: the 24-bus single-area topology and
// reactances replicated at +100/+200/+300 with inter-area ties and a hub
// bus 325. Loads/generation follow the published MW schedule, generation
// scaled for exact per-area balance.
Network generate_rts96();

// Synthetic 2383-bus system with 26 planted regions (tree + chord intra
// wiring, sparse inter-region ties), sized to mimic the Polish grid's
// community structure.
Network generate_synth2383(uint64_t seed = 2383);

// MATPOWER case text; negative injections become loads, positive ones
// generators, so parse_matpower round-trips the network exactly.
std::string to_matpower_text(const Network& net, const std::string& name);

}  // namespace kronopt

#pragma once

#include <vector>

#include "qdatabus/chain_model.hpp"

namespace testing_support {

inline qdatabus::ChainSpec chain(int ring_size, double coupling, std::vector<qdatabus::Probe> probes,
                                 bool with_spectator = false) {
  qdatabus::ChainSpec s;
  s.ring_size = ring_size;
  s.coupling = coupling;
  s.probes = std::move(probes);
  s.include_decoupled_c = with_spectator;
  return s;
}

}  // namespace testing_support

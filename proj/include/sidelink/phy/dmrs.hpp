#pragma once

#include <vector>

#include "sidelink/common.hpp"
#include "sidelink/phy/pool.hpp"

namespace sidelink::phy {

enum class SlChannel { Pscch, Pssch };

// Demodulation reference sequence for one DMRS symbol: cyclically extended
// Zadoff-Chu base sequence of the allocation length, phase-rotated by the
// cyclic shift (valid shifts 0,3,6,9 over a 12-position comb).
std::vector<cplx> generate_dmrs(int length, int cyclic_shift, SlChannel channel);

}  // namespace sidelink::phy

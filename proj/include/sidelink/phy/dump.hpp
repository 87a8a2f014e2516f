#pragma once

#include <string>

#include "sidelink/phy/grid.hpp"

namespace sidelink::phy {

// Debug dumps: binary little-endian complex64 (float32 re, float32 im) plus
// a JSON sidecar with dimensions, the occupancy map and the seed.
// Writes <prefix>.cf64 and <prefix>.json.
void dump_grid(const ResourceGrid& grid, const std::string& prefix, uint64_t seed);
void dump_waveform(const Waveform& wave, const std::string& prefix, uint64_t seed);

}  // namespace sidelink::phy

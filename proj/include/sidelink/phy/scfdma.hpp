#pragma once

#include "sidelink/phy/grid.hpp"

namespace sidelink::phy {

// Normal-CP SC-FDMA: per-symbol unitary IFFT over the pool FFT size with
// cyclic prefixes {80, 72x6} per slot at 15.36 Msps. Grid subcarrier k maps
// to FFT bin (k - n_sc/2) mod fft_size.
Waveform scfdma_modulate(const ResourceGrid& grid, const ResourcePool& pool);

ResourceGrid scfdma_demodulate(const Waveform& wave, const ResourcePool& pool);

// Number of time samples in one subframe for the pool numerology.
std::size_t scfdma_samples_per_subframe(const ResourcePool& pool);

}  // namespace sidelink::phy

#pragma once

#include <vector>

#include "sidelink/coding/bits.hpp"
#include "sidelink/common.hpp"

namespace sidelink::phy {

// Gray-mapped unit-power QPSK: (b0,b1)=(0,0) -> (+1+j)/sqrt(2), first bit on
// the real axis. Bit count must be even.
std::vector<cplx> qpsk_map(const coding::BitVec& bits);

// Exact max-log LLRs for the mapping above; one noise variance per symbol
// (total complex-noise power). Positive LLR means bit 0.
coding::SoftVec qpsk_soft_demap(const std::vector<cplx>& symbols, const std::vector<double>& noise_var);

coding::SoftVec qpsk_soft_demap(const std::vector<cplx>& symbols, double noise_var);

}  // namespace sidelink::phy

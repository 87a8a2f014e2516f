#pragma once

#include <cstdint>

#include "sidelink/coding/bits.hpp"

namespace sidelink::coding {

// Gold-sequence generator (length-31 LFSR pair, Nc = 1600 discard).
BitVec gold_sequence(uint32_t c_init, std::size_t length);

// XOR with the Gold sequence; an involution on hard bits.
BitVec scramble(const BitVec& bits, uint32_t c_init);

// Receiver-side counterpart: flips LLR signs where the sequence is 1.
SoftVec descramble_soft(const SoftVec& llrs, uint32_t c_init);

}  // namespace sidelink::coding

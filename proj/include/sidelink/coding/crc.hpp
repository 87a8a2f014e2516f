#pragma once

#include <cstdint>

#include "sidelink/coding/bits.hpp"

namespace sidelink::coding {

enum class CrcKind { Crc16, Crc24A, Crc24B };

int crc_length(CrcKind kind);

// Computes the CRC parity of `payload` (shift register initialised to zero,
// MSB-first). Returned vector has crc_length(kind) bits.
BitVec crc_parity(const BitVec& payload, CrcKind kind);

// Appends the parity, optionally XOR-masked, to the payload.
BitVec crc_attach(const BitVec& payload, CrcKind kind, uint32_t mask = 0);

// True iff the block's remainder is zero after unmasking the parity bits.
// Throws std::invalid_argument when the block is no longer than the CRC.
bool crc_check(const BitVec& block, CrcKind kind, uint32_t mask = 0);

}  // namespace sidelink::coding

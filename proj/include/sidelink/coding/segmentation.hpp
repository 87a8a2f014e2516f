#pragma once

#include "sidelink/coding/bits.hpp"

namespace sidelink::coding {

struct CodeBlock {
    BitVec bits;            // filler zeros + data (+ CRC24B when segmented)
    std::size_t n_filler = 0;
    bool has_crc24b = false;
};

// Splits a CRC24A-bearing transport block into turbo-sized code blocks.
// Single block (no CRC24B) when the input fits 6144 bits; otherwise the
// standard segmentation with per-block CRC24B and leading filler zeros.
std::vector<CodeBlock> segment_code_blocks(const BitVec& tb_with_crc);

// Reassembles the original transport block. Returns false when any CRC24B
// check fails (out still holds the concatenation).
bool desegment_code_blocks(const std::vector<CodeBlock>& blocks, BitVec& out);

}  // namespace sidelink::coding

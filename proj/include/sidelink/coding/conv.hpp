#pragma once

#include <array>

#include "sidelink/coding/bits.hpp"

namespace sidelink::coding {

// Rate-1/3 tail-biting convolutional code, constraint length 7,
// generators 133/171/165 (octal). The shift register is preloaded with the
// last 6 input bits so the start and end states coincide.
struct ConvStreams {
    BitVec d0, d1, d2;  // one parity stream per generator, each |input| long
};

ConvStreams conv_encode(const BitVec& input);

// Interleaved codeword d0[0],d1[0],d2[0],d0[1],... as used by rate matching
// oracles and the AWGN tests.
BitVec conv_encode_flat(const BitVec& input);

// Maximum-likelihood tail-biting decode of 3*info_len LLRs (positive => 0).
// Runs an unconstrained Viterbi pass first; when its best path is not
// tail-biting, falls back to one constrained pass per start state, which is
// exact ML over the tail-biting codebook.
BitVec conv_decode(const SoftVec& soft, std::size_t info_len);

}  // namespace sidelink::coding

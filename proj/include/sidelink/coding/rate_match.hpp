#pragma once

#include "sidelink/coding/bits.hpp"

namespace sidelink::coding {

// Turbo-code rate matching: 32-column sub-block interleaving of the three
// K+4 streams, interlaced circular buffer, redundancy-version start offset.
// `codeword` is the 3K+12 multiplexed turbo_encode output.
BitVec turbo_rate_match(const BitVec& codeword, std::size_t target_len, int rv);

// Inverse: accumulates LLRs of repeated positions, zero-fills punctured ones.
// Returns 3K+12 LLRs in turbo_encode order.
SoftVec turbo_rate_recover(const SoftVec& soft, std::size_t k, int rv);

// Convolutional-code rate matching (three K-long streams, no redundancy
// versions). `codeword` is the 3K flat conv_encode_flat output.
BitVec conv_rate_match(const BitVec& codeword, std::size_t target_len);

SoftVec conv_rate_recover(const SoftVec& soft, std::size_t info_len);

}  // namespace sidelink::coding

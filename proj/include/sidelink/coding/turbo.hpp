#pragma once

#include <functional>
#include <optional>

#include "sidelink/coding/bits.hpp"

namespace sidelink::coding {

// Supported interleaver sizes: 40..512 step 8, 528..1024 step 16,
// 1056..2048 step 32, 2112..6144 step 64.
bool is_valid_turbo_size(std::size_t k);

// Smallest supported size >= k; throws when k exceeds 6144.
std::size_t next_turbo_size(std::size_t k);

// Quadratic permutation polynomial interleaver (f1*i + f2*i^2) mod K.
std::vector<std::size_t> qpp_interleaver(std::size_t k);

// Parallel-concatenated encoder, two 8-state recursive constituents with
// trellis termination. Output is d0/d1/d2 multiplexed per position:
// [d0(0), d1(0), d2(0), d0(1), ...], each stream K+4 long (3K+12 bits total).
BitVec turbo_encode(const BitVec& input);

struct TurboResult {
    BitVec bits;
    bool crc_pass = false;  // meaningful only when a checker was supplied
    int iterations_run = 0;
};

// Iterative max-log-MAP decode of 3K+12 LLRs. When `crc_ok` is supplied the
// loop exits early on the first iteration whose hard decision passes.
TurboResult turbo_decode(const SoftVec& soft, std::size_t k, int max_iter,
                         const std::function<bool(const BitVec&)>& crc_ok = nullptr);

}  // namespace sidelink::coding

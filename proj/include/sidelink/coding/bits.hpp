#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sidelink::coding {

// Bit containers hold one bit per element, value 0 or 1.
using BitVec = std::vector<uint8_t>;

// Log-likelihood ratios, sign convention: positive => bit 0 more likely.
using SoftVec = std::vector<float>;

inline BitVec random_bits(std::size_t n, std::mt19937_64& rng) {
    BitVec v(n);
    for (auto& b : v) b = static_cast<uint8_t>(rng() & 1u);
    return v;
}

inline BitVec hard_decide(const SoftVec& llrs) {
    BitVec v(llrs.size());
    for (std::size_t i = 0; i < llrs.size(); ++i) v[i] = llrs[i] < 0.0f ? 1 : 0;
    return v;
}

}  // namespace sidelink::coding

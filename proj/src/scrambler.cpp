#include "sidelink/coding/scrambler.hpp"

namespace sidelink::coding {

namespace {
constexpr std::size_t kNc = 1600;
}

BitVec gold_sequence(uint32_t c_init, std::size_t length) {
    std::size_t n = length + kNc;
    BitVec x1(n + 31), x2(n + 31);
    x1[0] = 1;
    for (int i = 0; i < 31; ++i) x2[static_cast<std::size_t>(i)] = (c_init >> i) & 1u;
    for (std::size_t i = 0; i + 31 < n + 31; ++i) {
        x1[i + 31] = static_cast<uint8_t>((x1[i + 3] + x1[i]) & 1u);
        x2[i + 31] = static_cast<uint8_t>((x2[i + 3] + x2[i + 2] + x2[i + 1] + x2[i]) & 1u);
    }
    BitVec c(length);
    for (std::size_t i = 0; i < length; ++i) c[i] = static_cast<uint8_t>((x1[i + kNc] + x2[i + kNc]) & 1u);
    return c;
}

BitVec scramble(const BitVec& bits, uint32_t c_init) {
    BitVec seq = gold_sequence(c_init, bits.size());
    BitVec out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ^ seq[i];
    return out;
}

SoftVec descramble_soft(const SoftVec& llrs, uint32_t c_init) {
    BitVec seq = gold_sequence(c_init, llrs.size());
    SoftVec out(llrs.size());
    for (std::size_t i = 0; i < llrs.size(); ++i) out[i] = seq[i] ? -llrs[i] : llrs[i];
    return out;
}

}  // namespace sidelink::coding

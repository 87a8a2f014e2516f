#include "sidelink/coding/crc.hpp"

#include <stdexcept>

namespace sidelink::coding {

namespace {

struct CrcSpec {
    int len;
    uint32_t poly;  // generator without the leading x^len term
};

// Generator polynomials:
//   CRC16 : x^16 + x^12 + x^5 + 1
//   CRC24A: x^24 + x^23 + x^18 + x^17 + x^14 + x^11 + x^10 + x^7 + x^6 + x^5 + x^4 + x^3 + x + 1
//   CRC24B: x^24 + x^23 + x^6 + x^5 + x + 1
CrcSpec spec_of(CrcKind kind) {
    switch (kind) {
        case CrcKind::Crc16: return {16, 0x1021u};
        case CrcKind::Crc24A: return {24, 0x864cfbu};
        case CrcKind::Crc24B: return {24, 0x800063u};
    }
    throw std::logic_error("unknown CRC kind");
}

// MSB-first register: after consuming bits b, reg = (b(x) * x^len) mod g(x).
// The parity of a payload is therefore the register state itself, and a
// codeword (payload || parity) leaves the register at zero.
uint32_t remainder_of(const BitVec& bits, CrcSpec s) {
    const uint32_t mask = (1u << s.len) - 1u;
    uint32_t reg = 0;
    for (uint8_t b : bits) {
        uint32_t fb = ((reg >> (s.len - 1)) & 1u) ^ b;
        reg = (reg << 1) & mask;
        if (fb) reg ^= s.poly;
    }
    return reg;
}

}  // namespace

int crc_length(CrcKind kind) { return spec_of(kind).len; }

BitVec crc_parity(const BitVec& payload, CrcKind kind) {
    CrcSpec s = spec_of(kind);
    uint32_t rem = remainder_of(payload, s);
    BitVec parity(static_cast<std::size_t>(s.len));
    for (int i = 0; i < s.len; ++i) parity[static_cast<std::size_t>(i)] = (rem >> (s.len - 1 - i)) & 1u;
    return parity;
}

BitVec crc_attach(const BitVec& payload, CrcKind kind, uint32_t mask) {
    if (payload.empty()) throw std::invalid_argument("crc_attach: empty payload");
    BitVec out = payload;
    BitVec parity = crc_parity(payload, kind);
    int len = crc_length(kind);
    for (int i = 0; i < len; ++i) {
        uint8_t m = (mask >> (len - 1 - i)) & 1u;
        out.push_back(parity[static_cast<std::size_t>(i)] ^ m);
    }
    return out;
}

bool crc_check(const BitVec& block, CrcKind kind, uint32_t mask) {
    CrcSpec s = spec_of(kind);
    if (block.size() <= static_cast<std::size_t>(s.len))
        throw std::invalid_argument("crc_check: block shorter than CRC");
    BitVec unmasked = block;
    for (int i = 0; i < s.len; ++i) {
        uint8_t m = (mask >> (s.len - 1 - i)) & 1u;
        unmasked[unmasked.size() - static_cast<std::size_t>(s.len) + static_cast<std::size_t>(i)] ^= m;
    }
    return remainder_of(unmasked, s) == 0;
}

}  // namespace sidelink::coding

#include "sidelink/coding/segmentation.hpp"

#include <stdexcept>

#include "sidelink/coding/crc.hpp"
#include "sidelink/coding/turbo.hpp"

namespace sidelink::coding {

namespace {
constexpr std::size_t kMaxBlock = 6144;
constexpr std::size_t kSegCrcLen = 24;
}  // namespace

std::vector<CodeBlock> segment_code_blocks(const BitVec& tb_with_crc) {
    const std::size_t b = tb_with_crc.size();
    std::vector<CodeBlock> blocks;

    if (b <= kMaxBlock) {
        CodeBlock cb;
        cb.bits.assign(next_turbo_size(b) - b, 0);  // filler
        cb.n_filler = cb.bits.size();
        cb.bits.insert(cb.bits.end(), tb_with_crc.begin(), tb_with_crc.end());
        blocks.push_back(std::move(cb));
        return blocks;
    }

    const std::size_t c = (b + (kMaxBlock - kSegCrcLen) - 1) / (kMaxBlock - kSegCrcLen);
    const std::size_t b_prime = b + c * kSegCrcLen;
    const std::size_t k_plus = next_turbo_size((b_prime + c - 1) / c);
    std::size_t k_minus = 0;
    for (std::size_t k = 40; k < k_plus; k = next_turbo_size(k + 1)) k_minus = k;
    std::size_t c_minus = 0, c_plus = c;
    if (k_minus > 0) {
        std::size_t dk = k_plus - k_minus;
        c_minus = (c * k_plus - b_prime) / dk;
        c_plus = c - c_minus;
    }
    std::size_t f = c_plus * k_plus + c_minus * k_minus - b_prime;

    std::size_t src = 0;
    for (std::size_t r = 0; r < c; ++r) {
        std::size_t k_r = r < c_minus ? k_minus : k_plus;
        CodeBlock cb;
        cb.has_crc24b = true;
        cb.n_filler = r == 0 ? f : 0;
        BitVec payload(cb.n_filler, 0);
        std::size_t data_len = k_r - kSegCrcLen - cb.n_filler;
        payload.insert(payload.end(), tb_with_crc.begin() + static_cast<long>(src),
                       tb_with_crc.begin() + static_cast<long>(src + data_len));
        src += data_len;
        cb.bits = crc_attach(payload, CrcKind::Crc24B);
        blocks.push_back(std::move(cb));
    }
    return blocks;
}

bool desegment_code_blocks(const std::vector<CodeBlock>& blocks, BitVec& out) {
    out.clear();
    bool ok = true;
    for (const auto& cb : blocks) {
        BitVec payload = cb.bits;
        if (cb.has_crc24b) {
            if (payload.size() <= kSegCrcLen) throw std::invalid_argument("desegment: block too short");
            if (!crc_check(payload, CrcKind::Crc24B)) ok = false;
            payload.resize(payload.size() - kSegCrcLen);
        }
        out.insert(out.end(), payload.begin() + static_cast<long>(cb.n_filler), payload.end());
    }
    return ok;
}

}  // namespace sidelink::coding

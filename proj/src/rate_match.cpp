#include "sidelink/coding/rate_match.hpp"

#include <array>
#include <stdexcept>

namespace sidelink::coding {

namespace {

constexpr int kCols = 32;
constexpr std::array<int, 32> kPermTurbo = {0, 16, 8,  24, 4,  20, 12, 28, 2,  18, 10, 26, 6,  22, 14, 30,
                                            1, 17, 9,  25, 5,  21, 13, 29, 3,  19, 11, 27, 7,  23, 15, 31};
constexpr std::array<int, 32> kPermConv = {1,  17, 9,  25, 5,  21, 13, 29, 3,  19, 11, 27, 7,  23, 15, 31,
                                           0,  16, 8,  24, 4,  20, 12, 28, 2,  18, 10, 26, 6,  22, 14, 30};

constexpr std::size_t kNull = static_cast<std::size_t>(-1);

// Sub-block interleaver index map: output position -> source index within the
// D-long stream, or kNull for padding. Streams 0/1 use the column
// permutation; stream 2 of the turbo path uses the shifted linear formula.
std::vector<std::size_t> subblock_map(std::size_t d, const std::array<int, 32>& perm, bool shifted) {
    std::size_t rows = (d + kCols - 1) / kCols;
    std::size_t kp = rows * kCols;
    std::size_t nd = kp - d;  // leading padding
    std::vector<std::size_t> out(kp);
    if (!shifted) {
        std::size_t o = 0;
        for (int c = 0; c < kCols; ++c) {
            std::size_t col = static_cast<std::size_t>(perm[static_cast<std::size_t>(c)]);
            for (std::size_t r = 0; r < rows; ++r) {
                std::size_t lin = r * kCols + col;  // row-wise filled matrix
                out[o++] = lin < nd ? kNull : lin - nd;
            }
        }
    } else {
        for (std::size_t k = 0; k < kp; ++k) {
            std::size_t pi = (static_cast<std::size_t>(perm[k / rows]) + kCols * (k % rows) + 1) % kp;
            out[k] = pi < nd ? kNull : pi - nd;
        }
    }
    return out;
}

// Circular-buffer index map for the turbo path: buffer position -> index into
// the 3K+12 multiplexed codeword, kNull for padding.
std::vector<std::size_t> turbo_buffer_map(std::size_t k_info) {
    std::size_t d = k_info + 4;
    auto m0 = subblock_map(d, kPermTurbo, false);
    auto m1 = subblock_map(d, kPermTurbo, false);
    auto m2 = subblock_map(d, kPermTurbo, true);
    std::size_t kp = m0.size();

    // Stream-local index -> multiplexed codeword index.
    auto mux = [k_info](int stream, std::size_t i) -> std::size_t {
        if (i < k_info) return 3 * i + static_cast<std::size_t>(stream);
        return 3 * k_info + static_cast<std::size_t>(stream) * 4 + (i - k_info);
    };

    std::vector<std::size_t> buf(3 * kp);
    for (std::size_t i = 0; i < kp; ++i) buf[i] = m0[i] == kNull ? kNull : mux(0, m0[i]);
    for (std::size_t i = 0; i < kp; ++i) {
        buf[kp + 2 * i] = m1[i] == kNull ? kNull : mux(1, m1[i]);
        buf[kp + 2 * i + 1] = m2[i] == kNull ? kNull : mux(2, m2[i]);
    }
    return buf;
}

std::vector<std::size_t> conv_buffer_map(std::size_t k_info) {
    auto m = subblock_map(k_info, kPermConv, false);
    std::size_t kp = m.size();
    std::vector<std::size_t> buf(3 * kp);
    for (int s = 0; s < 3; ++s)
        for (std::size_t i = 0; i < kp; ++i)
            buf[static_cast<std::size_t>(s) * kp + i] = m[i] == kNull ? kNull : 3 * m[i] + static_cast<std::size_t>(s);
    return buf;
}

std::size_t turbo_k0(std::size_t kp, int rv) {
    std::size_t rows = kp / kCols;
    std::size_t ncb = 3 * kp;
    return rows * (2 * ((ncb + 8 * rows - 1) / (8 * rows)) * static_cast<std::size_t>(rv) + 2);
}

BitVec select_bits(const BitVec& codeword, const std::vector<std::size_t>& buf, std::size_t k0,
                   std::size_t target_len) {
    BitVec out;
    out.reserve(target_len);
    std::size_t pos = k0 % buf.size();
    while (out.size() < target_len) {
        if (buf[pos] != kNull) out.push_back(codeword[buf[pos]]);
        pos = (pos + 1) % buf.size();
    }
    return out;
}

SoftVec recover_llrs(const SoftVec& soft, const std::vector<std::size_t>& buf, std::size_t k0,
                     std::size_t codeword_len) {
    SoftVec out(codeword_len, 0.0f);
    std::size_t pos = k0 % buf.size();
    for (float llr : soft) {
        while (buf[pos] == kNull) pos = (pos + 1) % buf.size();
        out[buf[pos]] += llr;
        pos = (pos + 1) % buf.size();
    }
    return out;
}

}  // namespace

BitVec turbo_rate_match(const BitVec& codeword, std::size_t target_len, int rv) {
    if (codeword.size() < 12 || (codeword.size() - 12) % 3 != 0)
        throw std::invalid_argument("turbo_rate_match: codeword must be 3K+12 long");
    if (target_len == 0) throw std::invalid_argument("turbo_rate_match: empty target");
    if (rv < 0 || rv > 3) throw std::invalid_argument("turbo_rate_match: rv in 0..3");
    std::size_t k = (codeword.size() - 12) / 3;
    auto buf = turbo_buffer_map(k);
    return select_bits(codeword, buf, turbo_k0(buf.size() / 3, rv), target_len);
}

SoftVec turbo_rate_recover(const SoftVec& soft, std::size_t k, int rv) {
    auto buf = turbo_buffer_map(k);
    return recover_llrs(soft, buf, turbo_k0(buf.size() / 3, rv), 3 * k + 12);
}

BitVec conv_rate_match(const BitVec& codeword, std::size_t target_len) {
    if (codeword.empty() || codeword.size() % 3 != 0)
        throw std::invalid_argument("conv_rate_match: codeword must be 3K long");
    if (target_len == 0) throw std::invalid_argument("conv_rate_match: empty target");
    auto buf = conv_buffer_map(codeword.size() / 3);
    return select_bits(codeword, buf, 0, target_len);
}

SoftVec conv_rate_recover(const SoftVec& soft, std::size_t info_len) {
    auto buf = conv_buffer_map(info_len);
    return recover_llrs(soft, buf, 0, 3 * info_len);
}

}  // namespace sidelink::coding

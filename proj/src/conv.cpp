#include "sidelink/coding/conv.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>

namespace sidelink::coding {

namespace {

constexpr int kMemory = 6;
constexpr int kStates = 64;
// Octal 133, 171, 165 with taps [current, s1..s6], current = incoming bit.
constexpr std::array<uint8_t, 3> kGeneratorTaps = {0b1011011, 0b1111001, 0b1110101};

// State encodes the previous 6 bits, most recent in the MSB (bit 5).
inline uint8_t encode_output(int state, int bit, int gen) {
    int taps = kGeneratorTaps[static_cast<std::size_t>(gen)];
    int out = bit & (taps >> 6);
    for (int k = 0; k < kMemory; ++k) {
        int s_k = (state >> (kMemory - 1 - k)) & 1;  // s1..s6
        out ^= s_k & (taps >> (kMemory - 1 - k));
    }
    return static_cast<uint8_t>(out & 1);
}

inline int next_state(int state, int bit) { return ((state >> 1) | (bit << (kMemory - 1))) & (kStates - 1); }

struct Trellis {
    // [state][bit] -> next state, and the 3 output bits packed into bits 0..2.
    std::array<std::array<int, 2>, kStates> next{};
    std::array<std::array<int, 2>, kStates> out{};
    Trellis() {
        for (int s = 0; s < kStates; ++s) {
            for (int b = 0; b < 2; ++b) {
                next[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)] = next_state(s, b);
                int o = 0;
                for (int g = 0; g < 3; ++g) o |= encode_output(s, b, g) << g;
                out[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)] = o;
            }
        }
    }
};

const Trellis& trellis() {
    static const Trellis t;
    return t;
}

// Viterbi over the whole block with given initial metrics; returns final
// metrics and the traceback decision bits.
struct ViterbiResult {
    std::array<double, kStates> final_metric{};
    std::vector<std::array<uint8_t, kStates>> decision;  // chosen input bit per state per step... stores predecessor bit
};

ViterbiResult viterbi_pass(const SoftVec& soft, std::size_t n, const std::array<double, kStates>& init) {
    const Trellis& t = trellis();
    ViterbiResult r;
    r.decision.resize(n);
    std::array<double, kStates> cur = init, nxt{};
    for (std::size_t i = 0; i < n; ++i) {
        // Branch metric: correlation with BPSK(+1 for bit 0).
        const float l0 = soft[3 * i], l1 = soft[3 * i + 1], l2 = soft[3 * i + 2];
        std::array<double, 8> bm{};
        for (int o = 0; o < 8; ++o) {
            bm[static_cast<std::size_t>(o)] = ((o & 1) ? -l0 : l0) + ((o & 2) ? -l1 : l1) + ((o & 4) ? -l2 : l2);
        }
        nxt.fill(-std::numeric_limits<double>::infinity());
        auto& dec = r.decision[i];
        for (int s = 0; s < kStates; ++s) {
            double m = cur[static_cast<std::size_t>(s)];
            if (m == -std::numeric_limits<double>::infinity()) continue;
            for (int b = 0; b < 2; ++b) {
                int ns = t.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)];
                double cand = m + bm[static_cast<std::size_t>(t.out[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)])];
                if (cand > nxt[static_cast<std::size_t>(ns)]) {
                    nxt[static_cast<std::size_t>(ns)] = cand;
                    // Predecessor is reconstructible from ns and the shifted-out bit:
                    // store the oldest bit of s (bit 0) to walk backwards.
                    dec[static_cast<std::size_t>(ns)] = static_cast<uint8_t>(s & 1);
                }
            }
        }
        cur = nxt;
    }
    r.final_metric = cur;
    return r;
}

// Walks back from end_state, returning the input bits. The input bit at step
// i equals the MSB of the state after step i. `start_state` receives the
// state the surviving path actually began in.
BitVec traceback(const ViterbiResult& r, int end_state, int* start_state = nullptr) {
    std::size_t n = r.decision.size();
    BitVec bits(n);
    int s = end_state;
    for (std::size_t i = n; i-- > 0;) {
        bits[i] = static_cast<uint8_t>((s >> (kMemory - 1)) & 1);
        int oldest = r.decision[i][static_cast<std::size_t>(s)];
        s = ((s << 1) | oldest) & (kStates - 1);
    }
    if (start_state) *start_state = s;
    return bits;
}

}  // namespace

ConvStreams conv_encode(const BitVec& input) {
    if (input.size() < static_cast<std::size_t>(kMemory))
        throw std::invalid_argument("conv_encode: input shorter than 6 bits");
    std::size_t n = input.size();
    // Initial state holds the last 6 bits, most recent (c_{K-1}) in the MSB.
    int state = 0;
    for (int k = 0; k < kMemory; ++k) state |= input[n - 1 - static_cast<std::size_t>(k)] << (kMemory - 1 - k);
    ConvStreams out;
    out.d0.resize(n);
    out.d1.resize(n);
    out.d2.resize(n);
    const Trellis& t = trellis();
    for (std::size_t i = 0; i < n; ++i) {
        int b = input[i];
        int o = t.out[static_cast<std::size_t>(state)][static_cast<std::size_t>(b)];
        out.d0[i] = static_cast<uint8_t>(o & 1);
        out.d1[i] = static_cast<uint8_t>((o >> 1) & 1);
        out.d2[i] = static_cast<uint8_t>((o >> 2) & 1);
        state = t.next[static_cast<std::size_t>(state)][static_cast<std::size_t>(b)];
    }
    return out;
}

BitVec conv_encode_flat(const BitVec& input) {
    ConvStreams s = conv_encode(input);
    BitVec flat(3 * input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        flat[3 * i] = s.d0[i];
        flat[3 * i + 1] = s.d1[i];
        flat[3 * i + 2] = s.d2[i];
    }
    return flat;
}

BitVec conv_decode(const SoftVec& soft, std::size_t info_len) {
    if (soft.size() != 3 * info_len) throw std::invalid_argument("conv_decode: soft length must be 3*info_len");
    if (info_len < static_cast<std::size_t>(kMemory))
        throw std::invalid_argument("conv_decode: info_len shorter than 6 bits");

    // Unconstrained pass: if the globally best path is tail-biting it is the
    // maximum-likelihood tail-biting path.
    std::array<double, kStates> flat_init{};
    ViterbiResult open = viterbi_pass(soft, info_len, flat_init);
    int best_end = 0;
    for (int s = 1; s < kStates; ++s)
        if (open.final_metric[static_cast<std::size_t>(s)] > open.final_metric[static_cast<std::size_t>(best_end)]) best_end = s;
    int start = 0;
    BitVec cand = traceback(open, best_end, &start);
    if (start == best_end) return cand;

    // Exact fallback: constrain start == end for every state.
    double best_metric = -std::numeric_limits<double>::infinity();
    BitVec best;
    for (int s0 = 0; s0 < kStates; ++s0) {
        std::array<double, kStates> init;
        init.fill(-std::numeric_limits<double>::infinity());
        init[static_cast<std::size_t>(s0)] = 0.0;
        ViterbiResult run = viterbi_pass(soft, info_len, init);
        double m = run.final_metric[static_cast<std::size_t>(s0)];
        if (m > best_metric) {
            best_metric = m;
            best = traceback(run, s0);
        }
    }
    return best;
}

}  // namespace sidelink::coding

#include "sidelink/coding/turbo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sidelink::coding {

namespace {

struct QppEntry {
    std::size_t k;
    std::size_t f1, f2;
};

// f1/f2 per interleaver size (3GPP QPP parameter table).
constexpr QppEntry kQpp[] = {
    {40, 3, 10},     {48, 7, 12},     {56, 19, 42},    {64, 7, 16},     {72, 7, 18},     {80, 11, 20},
    {88, 5, 22},     {96, 11, 24},    {104, 7, 26},    {112, 41, 84},   {120, 103, 90},  {128, 15, 32},
    {136, 9, 34},    {144, 17, 108},  {152, 9, 38},    {160, 21, 120},  {168, 101, 84},  {176, 21, 44},
    {184, 57, 46},   {192, 23, 48},   {200, 13, 50},   {208, 27, 52},   {216, 11, 36},   {224, 27, 56},
    {232, 85, 58},   {240, 29, 60},   {248, 33, 62},   {256, 15, 32},   {264, 17, 198},  {272, 33, 68},
    {280, 103, 210}, {288, 19, 36},   {296, 19, 74},   {304, 37, 76},   {312, 19, 78},   {320, 21, 120},
    {328, 21, 82},   {336, 115, 84},  {344, 193, 86},  {352, 21, 44},   {360, 133, 90},  {368, 81, 46},
    {376, 45, 94},   {384, 23, 48},   {392, 243, 98},  {400, 151, 40},  {408, 155, 102}, {416, 25, 52},
    {424, 51, 106},  {432, 47, 72},   {440, 91, 110},  {448, 29, 168},  {456, 29, 114},  {464, 247, 58},
    {472, 29, 118},  {480, 89, 180},  {488, 91, 122},  {496, 157, 62},  {504, 55, 84},   {512, 31, 64},
    {528, 17, 66},   {544, 35, 68},   {560, 227, 420}, {576, 65, 96},   {592, 19, 74},   {608, 37, 76},
    {624, 41, 234},  {640, 39, 80},   {656, 185, 82},  {672, 43, 252},  {688, 21, 86},   {704, 155, 44},
    {720, 79, 120},  {736, 139, 92},  {752, 23, 94},   {768, 217, 48},  {784, 25, 98},   {800, 17, 80},
    {816, 127, 102}, {832, 25, 52},   {848, 239, 106}, {864, 17, 48},   {880, 137, 110}, {896, 215, 112},
    {912, 29, 114},  {928, 15, 58},   {944, 147, 118}, {960, 29, 60},   {976, 59, 122},  {992, 65, 124},
    {1008, 55, 84},  {1024, 31, 64},  {1056, 17, 66},  {1088, 171, 204},{1120, 67, 140}, {1152, 35, 72},
    {1184, 19, 74},  {1216, 39, 76},  {1248, 19, 78},  {1280, 199, 240},{1312, 21, 82},  {1344, 211, 252},
    {1376, 21, 86},  {1408, 43, 88},  {1440, 149, 60}, {1472, 45, 92},  {1504, 49, 846}, {1536, 71, 48},
    {1568, 13, 28},  {1600, 17, 80},  {1632, 25, 102}, {1664, 183, 104},{1696, 55, 954}, {1728, 127, 96},
    {1760, 27, 110}, {1792, 29, 112}, {1824, 29, 114}, {1856, 57, 116}, {1888, 45, 354}, {1920, 31, 120},
    {1952, 59, 610}, {1984, 185, 124},{2016, 113, 420},{2048, 31, 64},  {2112, 17, 66},  {2176, 171, 136},
    {2240, 209, 420},{2304, 253, 216},{2368, 367, 444},{2432, 265, 456},{2496, 181, 468},{2560, 39, 80},
    {2624, 27, 164}, {2688, 127, 504},{2752, 143, 172},{2816, 43, 88},  {2880, 29, 300}, {2944, 45, 92},
    {3008, 157, 188},{3072, 47, 96},  {3136, 13, 28},  {3200, 111, 240},{3264, 443, 204},{3328, 51, 104},
    {3392, 51, 212}, {3456, 451, 192},{3520, 257, 220},{3584, 57, 336}, {3648, 313, 228},{3712, 271, 232},
    {3776, 179, 236},{3840, 331, 120},{3904, 363, 244},{3968, 375, 248},{4032, 127, 168},{4096, 31, 64},
    {4160, 33, 130}, {4224, 43, 264}, {4288, 33, 134}, {4352, 477, 408},{4416, 35, 138}, {4480, 233, 280},
    {4544, 357, 142},{4608, 337, 480},{4672, 37, 146}, {4736, 71, 444}, {4800, 71, 120}, {4864, 37, 152},
    {4928, 39, 462}, {4992, 127, 234},{5056, 39, 158}, {5120, 39, 80},  {5184, 31, 96},  {5248, 113, 902},
    {5312, 41, 166}, {5376, 251, 336},{5440, 43, 170}, {5504, 21, 86},  {5568, 43, 174}, {5632, 45, 176},
    {5696, 45, 178}, {5760, 161, 120},{5824, 89, 182}, {5888, 323, 184},{5952, 47, 186}, {6016, 23, 94},
    {6080, 47, 190}, {6144, 263, 480},
};

const QppEntry* find_qpp(std::size_t k) {
    for (const auto& e : kQpp)
        if (e.k == k) return &e;
    return nullptr;
}

// 8-state recursive systematic constituent, feedback 1+D^2+D^3,
// feedforward 1+D+D^3. State bits: s1 (newest) .. s3.
inline int rsc_feedback(int state) { return ((state >> 1) ^ state) & 1; }  // s2 ^ s3

inline int rsc_parity_of(int state, int a) {
    // z = a ^ s1 ^ s3
    return a ^ ((state >> 2) & 1) ^ (state & 1);
}

inline int rsc_next(int state, int a) { return ((a << 2) | (state >> 1)) & 7; }

struct RscTrellis {
    // For input bit b at state s: internal bit a = b ^ feedback(s).
    std::array<std::array<int, 2>, 8> next{};
    std::array<std::array<int, 2>, 8> parity{};
    RscTrellis() {
        for (int s = 0; s < 8; ++s) {
            for (int b = 0; b < 2; ++b) {
                int a = b ^ rsc_feedback(s);
                next[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)] = rsc_next(s, a);
                parity[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)] = rsc_parity_of(s, a);
            }
        }
    }
};

const RscTrellis& rsc() {
    static const RscTrellis t;
    return t;
}

struct TailBits {
    // Termination systematic and parity for 3 flush steps.
    std::array<uint8_t, 3> x{}, z{};
};

// Encodes `input` through one constituent, returning the parity stream and the
// termination bits.
void rsc_encode(const BitVec& input, BitVec& parity, TailBits& tail) {
    const RscTrellis& t = rsc();
    parity.resize(input.size());
    int s = 0;
    for (std::size_t i = 0; i < input.size(); ++i) {
        int b = input[i];
        parity[i] = static_cast<uint8_t>(t.parity[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)]);
        s = t.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)];
    }
    for (int k = 0; k < 3; ++k) {
        int xb = rsc_feedback(s);  // drives the internal bit to zero
        tail.x[static_cast<std::size_t>(k)] = static_cast<uint8_t>(xb);
        tail.z[static_cast<std::size_t>(k)] =
            static_cast<uint8_t>(t.parity[static_cast<std::size_t>(s)][static_cast<std::size_t>(xb)]);
        s = t.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(xb)];
    }
}

constexpr float kNegInf = -1e30f;

// Max-log BCJR for one terminated constituent code.
// sys/par/apriori cover K data steps; tail_sys/tail_par the 3 flush steps.
// Returns the a-posteriori LLRs of the K data bits.
void bcjr_maxlog(const std::vector<float>& sys, const std::vector<float>& par,
                 const std::vector<float>& apriori, const std::array<float, 3>& tail_sys,
                 const std::array<float, 3>& tail_par, std::vector<float>& app) {
    const RscTrellis& t = rsc();
    const std::size_t k = sys.size();
    const std::size_t n = k + 3;

    auto step_metric = [&](std::size_t i, int b, int p) -> float {
        float ls = i < k ? sys[i] + apriori[i] : tail_sys[i - k];
        float lp = i < k ? par[i] : tail_par[i - k];
        return 0.5f * ((b ? -ls : ls) + (p ? -lp : lp));
    };

    std::vector<std::array<float, 8>> alpha(n + 1);
    alpha[0].fill(kNegInf);
    alpha[0][0] = 0.0f;
    for (std::size_t i = 0; i < n; ++i) {
        alpha[i + 1].fill(kNegInf);
        for (int s = 0; s < 8; ++s) {
            float a = alpha[i][static_cast<std::size_t>(s)];
            if (a <= kNegInf) continue;
            for (int b = 0; b < 2; ++b) {
                int ns = t.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)];
                float m = a + step_metric(i, b, t.parity[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)]);
                auto& slot = alpha[i + 1][static_cast<std::size_t>(ns)];
                if (m > slot) slot = m;
            }
        }
    }

    std::array<float, 8> beta{}, beta_next{};
    beta.fill(kNegInf);
    beta[0] = 0.0f;  // termination flushes to state 0
    app.assign(k, 0.0f);
    for (std::size_t i = n; i-- > 0;) {
        beta_next.fill(kNegInf);
        float best0 = kNegInf, best1 = kNegInf;
        for (int s = 0; s < 8; ++s) {
            for (int b = 0; b < 2; ++b) {
                int ns = t.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)];
                float g = step_metric(i, b, t.parity[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)]);
                float bn = g + beta[static_cast<std::size_t>(ns)];
                auto& slot = beta_next[static_cast<std::size_t>(s)];
                if (bn > slot) slot = bn;
                if (i < k) {
                    float full = alpha[i][static_cast<std::size_t>(s)] + bn;
                    if (b == 0) {
                        if (full > best0) best0 = full;
                    } else if (full > best1) {
                        best1 = full;
                    }
                }
            }
        }
        if (i < k) app[i] = best0 - best1;
        beta = beta_next;
    }
}

}  // namespace

bool is_valid_turbo_size(std::size_t k) { return find_qpp(k) != nullptr; }

std::size_t next_turbo_size(std::size_t k) {
    for (const auto& e : kQpp)
        if (e.k >= k) return e.k;
    throw std::invalid_argument("next_turbo_size: exceeds 6144");
}

std::vector<std::size_t> qpp_interleaver(std::size_t k) {
    const QppEntry* e = find_qpp(k);
    if (!e) throw std::invalid_argument("qpp_interleaver: unsupported size");
    std::vector<std::size_t> pi(k);
    for (std::size_t i = 0; i < k; ++i) {
        // (f1*i + f2*i^2) mod k, computed with 64-bit wraparound safety.
        unsigned long long ii = i;
        pi[i] = static_cast<std::size_t>((e->f1 * ii % k + e->f2 % k * ii % k * ii % k) % k);
    }
    return pi;
}

BitVec turbo_encode(const BitVec& input) {
    const std::size_t k = input.size();
    if (!is_valid_turbo_size(k)) throw std::invalid_argument("turbo_encode: unsupported block size");
    std::vector<std::size_t> pi = qpp_interleaver(k);
    BitVec interleaved(k);
    for (std::size_t i = 0; i < k; ++i) interleaved[i] = input[pi[i]];

    BitVec p1, p2;
    TailBits t1, t2;
    rsc_encode(input, p1, t1);
    rsc_encode(interleaved, p2, t2);

    BitVec out(3 * k + 12);
    for (std::size_t i = 0; i < k; ++i) {
        out[3 * i] = input[i];
        out[3 * i + 1] = p1[i];
        out[3 * i + 2] = p2[i];
    }
    // Tail multiplexing: streams continue as
    //   d0: x(K)  z(K+1)  x'(K)  z'(K+1)
    //   d1: z(K)  x(K+2)  z'(K)  x'(K+2)
    //   d2: x(K+1) z(K+2) x'(K+1) z'(K+2)
    const std::size_t b = 3 * k;
    out[b + 0] = t1.x[0];  out[b + 1] = t1.z[0];  out[b + 2] = t1.x[1];
    out[b + 3] = t1.z[1];  out[b + 4] = t1.x[2];  out[b + 5] = t1.z[2];
    out[b + 6] = t2.x[0];  out[b + 7] = t2.z[0];  out[b + 8] = t2.x[1];
    out[b + 9] = t2.z[1];  out[b + 10] = t2.x[2]; out[b + 11] = t2.z[2];
    return out;
}

TurboResult turbo_decode(const SoftVec& soft, std::size_t k, int max_iter,
                         const std::function<bool(const BitVec&)>& crc_ok) {
    if (soft.size() != 3 * k + 12) throw std::invalid_argument("turbo_decode: soft length must be 3K+12");
    if (max_iter < 1) throw std::invalid_argument("turbo_decode: max_iter >= 1 required");
    if (!is_valid_turbo_size(k)) throw std::invalid_argument("turbo_decode: unsupported block size");

    std::vector<std::size_t> pi = qpp_interleaver(k);

    std::vector<float> sys(k), par1(k), par2(k), sys_pi(k);
    for (std::size_t i = 0; i < k; ++i) {
        sys[i] = soft[3 * i];
        par1[i] = soft[3 * i + 1];
        par2[i] = soft[3 * i + 2];
    }
    for (std::size_t i = 0; i < k; ++i) sys_pi[i] = sys[pi[i]];

    const std::size_t b = 3 * k;
    std::array<float, 3> t1s = {soft[b + 0], soft[b + 2], soft[b + 4]};
    std::array<float, 3> t1p = {soft[b + 1], soft[b + 3], soft[b + 5]};
    std::array<float, 3> t2s = {soft[b + 6], soft[b + 8], soft[b + 10]};
    std::array<float, 3> t2p = {soft[b + 7], soft[b + 9], soft[b + 11]};

    constexpr float kExtScale = 0.75f;  // conventional max-log extrinsic damping
    std::vector<float> apr1(k, 0.0f), apr2(k, 0.0f), app(k), ext(k);

    TurboResult res;
    for (int it = 1; it <= max_iter; ++it) {
        bcjr_maxlog(sys, par1, apr1, t1s, t1p, app);
        for (std::size_t i = 0; i < k; ++i) ext[i] = kExtScale * (app[i] - sys[i] - apr1[i]);
        for (std::size_t i = 0; i < k; ++i) apr2[i] = ext[pi[i]];

        bcjr_maxlog(sys_pi, par2, apr2, t2s, t2p, app);
        for (std::size_t i = 0; i < k; ++i) ext[i] = kExtScale * (app[i] - sys_pi[i] - apr2[i]);
        for (std::size_t i = 0; i < k; ++i) apr1[pi[i]] = ext[i];

        res.iterations_run = it;
        BitVec hard(k);
        for (std::size_t i = 0; i < k; ++i) hard[pi[i]] = app[i] < 0.0f ? 1 : 0;
        res.bits = std::move(hard);
        if (crc_ok && crc_ok(res.bits)) {
            res.crc_pass = true;
            return res;
        }
    }
    if (crc_ok) res.crc_pass = crc_ok(res.bits);
    return res;
}

}  // namespace sidelink::coding

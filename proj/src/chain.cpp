#include "sidelink/phy/chain.hpp"

#include <stdexcept>

#include "sidelink/channel/mrc.hpp"
#include "sidelink/coding/conv.hpp"
#include "sidelink/coding/crc.hpp"
#include "sidelink/coding/rate_match.hpp"
#include "sidelink/coding/scrambler.hpp"
#include "sidelink/coding/turbo.hpp"
#include "sidelink/phy/dft.hpp"
#include "sidelink/phy/dmrs.hpp"
#include "sidelink/phy/qpsk.hpp"

namespace sidelink::phy {

using coding::BitVec;
using coding::SoftVec;

namespace {

constexpr int kSciCrcBits = 16;
constexpr int kTbCrcBits = 24;

// Time-first symbol-to-grid interleaving: stream index i lands on data symbol
// i % n_sym at subcarrier offset i / n_sym, spreading the codeword across the
// subframe before DFT spreading.
void map_channel(ResourceGrid& grid, const std::vector<cplx>& stream, int sc0, int n_sc,
                 const std::vector<int>& data_syms, CellTag tag) {
    const int n_sym = static_cast<int>(data_syms.size());
    std::vector<cplx> block(static_cast<std::size_t>(n_sc));
    for (int li = 0; li < n_sym; ++li) {
        for (int k = 0; k < n_sc; ++k)
            block[static_cast<std::size_t>(k)] =
                stream[static_cast<std::size_t>(k) * static_cast<std::size_t>(n_sym) + static_cast<std::size_t>(li)];
        auto spread = dft_forward(block);
        int l = data_syms[static_cast<std::size_t>(li)];
        for (int k = 0; k < n_sc; ++k) {
            grid.at(sc0 + k, l) = spread[static_cast<std::size_t>(k)];
            grid.tag(sc0 + k, l) = tag;
        }
    }
}

// Inverse of map_channel over an equalised allocation, averaging the per-cell
// noise variances within each despread block (the unitary IDFT whitens them).
void unmap_channel(const channel::MrcResult& mrc, int n_sc, int n_sym_total,
                   const std::vector<int>& data_syms, std::vector<cplx>& stream,
                   std::vector<double>& stream_var) {
    (void)n_sym_total;
    const int n_sym = static_cast<int>(data_syms.size());
    stream.resize(static_cast<std::size_t>(n_sc) * static_cast<std::size_t>(n_sym));
    stream_var.resize(stream.size());
    std::vector<cplx> block(static_cast<std::size_t>(n_sc));
    for (int li = 0; li < n_sym; ++li) {
        int l = data_syms[static_cast<std::size_t>(li)];
        double var_acc = 0;
        for (int k = 0; k < n_sc; ++k) {
            std::size_t cell = static_cast<std::size_t>(l) * static_cast<std::size_t>(n_sc) + static_cast<std::size_t>(k);
            block[static_cast<std::size_t>(k)] = mrc.z[cell];
            var_acc += mrc.noise_var[cell];
        }
        auto despread = dft_inverse(block);
        double var = var_acc / n_sc;
        for (int k = 0; k < n_sc; ++k) {
            std::size_t si =
                static_cast<std::size_t>(k) * static_cast<std::size_t>(n_sym) + static_cast<std::size_t>(li);
            stream[si] = despread[static_cast<std::size_t>(k)];
            stream_var[si] = var;
        }
    }
}

void place_dmrs(ResourceGrid& grid, const ResourcePool& pool, int sc0, int n_sc, int shift, SlChannel ch) {
    auto seq = generate_dmrs(n_sc, shift, ch);
    for (int l : pool.dmrs_symbols()) {
        for (int k = 0; k < n_sc; ++k) {
            grid.at(sc0 + k, l) = seq[static_cast<std::size_t>(k)];
            grid.tag(sc0 + k, l) = CellTag::Dmrs;
        }
    }
}

struct AllocationSoft {
    SoftVec llrs;
};

// Shared receive front end for one allocation: per-antenna channel estimation
// on its DMRS, MRC, despreading, demapping.
AllocationSoft receive_allocation(const std::vector<const ResourceGrid*>& rx, double noise_var,
                                  const ResourcePool& pool, int sc0, int n_sc, int shift, SlChannel ch,
                                  int freq_window) {
    auto ref = generate_dmrs(n_sc, shift, ch);
    std::vector<ChannelEstimate> ests;
    ests.reserve(rx.size());
    for (const auto* g : rx)
        ests.push_back(estimate_channel(*g, ref, sc0, n_sc, pool.dmrs_symbols(), freq_window));
    std::vector<const ChannelEstimate*> est_ptr;
    for (const auto& e : ests) est_ptr.push_back(&e);

    auto mrc = channel::mrc_combine(rx, est_ptr, noise_var);
    // mrc indexes cells relative to sc0 with n_sc columns per symbol.
    std::vector<cplx> stream;
    std::vector<double> stream_var;
    unmap_channel(mrc, n_sc, pool.symbols_per_subframe, pool.data_symbols(), stream, stream_var);

    AllocationSoft out;
    out.llrs = qpsk_soft_demap(stream, stream_var);
    return out;
}

}  // namespace

LinkDims link_dims(const ResourcePool& pool) {
    pool.validate();
    LinkDims d;
    d.pscch_sc0 = 0;
    d.pscch_n_sc = pool.sci_prbs * pool.prb_size;
    const std::size_t n_data = static_cast<std::size_t>(pool.n_data_symbols());
    d.e_pscch = static_cast<std::size_t>(d.pscch_n_sc) * n_data * 2;
    d.pssch_sc0 = pool.pssch_prb_start() * pool.prb_size;
    d.pssch_n_sc = pool.pssch_n_prbs() * pool.prb_size;
    d.e_pssch = static_cast<std::size_t>(d.pssch_n_sc) * n_data * 2;
    // Largest turbo size at or below the 1/3-rate capacity of the allocation.
    std::size_t k_cap = d.e_pssch / 3;
    if (k_cap < 40) throw std::invalid_argument("link_dims: allocation too small for rate-1/3 data");
    std::size_t k = 40;
    for (std::size_t cand = k; cand <= 6144 && cand <= k_cap; cand = coding::next_turbo_size(cand + 1)) {
        k = cand;
        if (cand == 6144) break;
    }
    d.turbo_k = k;
    d.tbs_bits = k - kTbCrcBits;
    d.code_rate = static_cast<double>(d.turbo_k) / static_cast<double>(d.e_pssch);
    return d;
}

std::vector<uint8_t> SciMessage::pack() const {
    auto push = [](std::vector<uint8_t>& v, uint32_t val, int width) {
        if (val >= (1u << width)) throw std::invalid_argument("SciMessage: field exceeds its width");
        for (int i = width - 1; i >= 0; --i) v.push_back((val >> i) & 1u);
    };
    std::vector<uint8_t> bits;
    bits.reserve(kBits);
    push(bits, mcs, 5);
    push(bits, resource_indication, 8);
    push(bits, time_resource_pattern, 7);
    push(bits, group_destination_id, 10);
    push(bits, frequency_hopping_flag, 1);
    push(bits, retransmission_opportunity, 1);
    return bits;
}

SciMessage SciMessage::unpack(const std::vector<uint8_t>& bits) {
    if (bits.size() != kBits) throw std::invalid_argument("SciMessage: expected 32 bits");
    std::size_t pos = 0;
    auto pull = [&](int width) {
        uint32_t v = 0;
        for (int i = 0; i < width; ++i) v = (v << 1) | bits[pos++];
        return v;
    };
    SciMessage m;
    m.mcs = pull(5);
    m.resource_indication = pull(8);
    m.time_resource_pattern = pull(7);
    m.group_destination_id = pull(10);
    m.frequency_hopping_flag = pull(1);
    m.retransmission_opportunity = pull(1);
    return m;
}

ResourceGrid build_tx_grid(const SciMessage& sci, const BitVec& transport_block, const ResourcePool& pool,
                           int cyclic_shift) {
    LinkDims d = link_dims(pool);
    if (transport_block.size() != d.tbs_bits)
        throw std::invalid_argument("build_tx_grid: transport block must match the pool TBS");
    if (d.pssch_sc0 + d.pssch_n_sc > pool.n_subcarriers())
        throw std::invalid_argument("build_tx_grid: PSSCH allocation overflows the pool");

    ResourceGrid grid(pool.n_subcarriers(), pool.symbols_per_subframe);
    auto data_syms = pool.data_symbols();

    // Control: CRC16, tail-biting convolutional code, rate matching,
    // PSCCH-specific scrambling, QPSK, DFT spreading.
    BitVec sci_coded = coding::crc_attach(sci.pack(), coding::CrcKind::Crc16);
    BitVec sci_rm = coding::conv_rate_match(coding::conv_encode_flat(sci_coded), d.e_pscch);
    BitVec sci_scr = coding::scramble(sci_rm, kPscchScramblingInit);
    map_channel(grid, qpsk_map(sci_scr), d.pscch_sc0, d.pscch_n_sc, data_syms, CellTag::Pscch);
    place_dmrs(grid, pool, d.pscch_sc0, d.pscch_n_sc, cyclic_shift, SlChannel::Pscch);

    // Data: CRC24A, turbo, rate matching, scrambling from the SCI group
    // destination identity, QPSK, DFT spreading.
    BitVec tb_crc = coding::crc_attach(transport_block, coding::CrcKind::Crc24A);
    BitVec cw = coding::turbo_encode(tb_crc);
    BitVec rm = coding::turbo_rate_match(cw, d.e_pssch, 0);
    BitVec scr = coding::scramble(rm, sci.group_destination_id);
    map_channel(grid, qpsk_map(scr), d.pssch_sc0, d.pssch_n_sc, data_syms, CellTag::Pssch);
    place_dmrs(grid, pool, d.pssch_sc0, d.pssch_n_sc, cyclic_shift, SlChannel::Pssch);
    return grid;
}

std::optional<SciDetection> blind_decode_pscch(const std::vector<const ResourceGrid*>& rx,
                                               double noise_var_per_antenna, const ResourcePool& pool,
                                               int chest_freq_window) {
    LinkDims d = link_dims(pool);
    for (int shift : {0, 3, 6, 9}) {
        auto soft = receive_allocation(rx, noise_var_per_antenna, pool, d.pscch_sc0, d.pscch_n_sc, shift,
                                       SlChannel::Pscch, chest_freq_window);
        SoftVec descr = coding::descramble_soft(soft.llrs, kPscchScramblingInit);
        SoftVec rec = coding::conv_rate_recover(descr, SciMessage::kBits + kSciCrcBits);
        BitVec dec = coding::conv_decode(rec, SciMessage::kBits + kSciCrcBits);
        if (coding::crc_check(dec, coding::CrcKind::Crc16)) {
            dec.resize(SciMessage::kBits);
            return SciDetection{SciMessage::unpack(dec), shift};
        }
    }
    return std::nullopt;
}

PsschDecode decode_pssch(const std::vector<const ResourceGrid*>& rx, double noise_var_per_antenna,
                         const SciDetection& detection, const ResourcePool& pool, int max_turbo_iter,
                         int chest_freq_window) {
    LinkDims d = link_dims(pool);
    auto soft = receive_allocation(rx, noise_var_per_antenna, pool, d.pssch_sc0, d.pssch_n_sc,
                                   detection.cyclic_shift, SlChannel::Pssch, chest_freq_window);
    SoftVec descr = coding::descramble_soft(soft.llrs, detection.sci.group_destination_id);
    SoftVec rec = coding::turbo_rate_recover(descr, d.turbo_k, 0);
    auto crc_fn = [](const BitVec& bits) { return coding::crc_check(bits, coding::CrcKind::Crc24A); };
    auto res = coding::turbo_decode(rec, d.turbo_k, max_turbo_iter, crc_fn);

    PsschDecode out;
    out.crc_ok = res.crc_pass;
    out.turbo_iterations = res.iterations_run;
    out.payload = res.bits;
    if (out.payload.size() >= static_cast<std::size_t>(kTbCrcBits))
        out.payload.resize(out.payload.size() - kTbCrcBits);
    return out;
}

}  // namespace sidelink::phy

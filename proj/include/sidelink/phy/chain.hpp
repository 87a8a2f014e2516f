#pragma once

#include <optional>

#include "sidelink/coding/bits.hpp"
#include "sidelink/phy/chest.hpp"
#include "sidelink/phy/grid.hpp"
#include "sidelink/phy/pool.hpp"

namespace sidelink::phy {

// Sizes derived from the pool geometry for the simulated link.
struct LinkDims {
    int pscch_sc0 = 0;       // first PSCCH subcarrier
    int pscch_n_sc = 24;     // 2 PRBs
    std::size_t e_pscch = 0; // coded SCI bits after rate matching
    int pssch_sc0 = 0;
    int pssch_n_sc = 0;
    std::size_t e_pssch = 0;  // coded data bits after rate matching
    std::size_t turbo_k = 0;  // transport block + CRC24A
    std::size_t tbs_bits = 0; // transport block payload
    double code_rate = 0.0;   // turbo_k / e_pssch
};

LinkDims link_dims(const ResourcePool& pool);

// PSCCH scrambling is fixed; PSSCH scrambling derives from the SCI group
// destination identity.
inline constexpr uint32_t kPscchScramblingInit = 510;

// Builds the transmit grid: SCI through CRC16 + tail-biting convolutional
// coding onto the PSCCH PRB pair, the transport block through CRC24A + turbo
// coding onto the PSSCH allocation, DMRS at symbols {2,5,8,11} with the given
// cyclic shift, everything QPSK + DFT-spread.
ResourceGrid build_tx_grid(const SciMessage& sci, const coding::BitVec& transport_block,
                           const ResourcePool& pool, int cyclic_shift);

struct SciDetection {
    SciMessage sci;
    int cyclic_shift = 0;
};

// Blind PSCCH decode: tries every cyclic shift, returns the first whose CRC16
// passes. `rx` holds one grid per receive antenna.
std::optional<SciDetection> blind_decode_pscch(const std::vector<const ResourceGrid*>& rx,
                                               double noise_var_per_antenna, const ResourcePool& pool,
                                               int chest_freq_window = 1);

struct PsschDecode {
    coding::BitVec payload;  // CRC24A stripped
    bool crc_ok = false;
    int turbo_iterations = 0;
};

// The decoded SCI supplies the PSSCH scrambling identity; the detection's
// cyclic shift selects the DMRS hypothesis.
PsschDecode decode_pssch(const std::vector<const ResourceGrid*>& rx, double noise_var_per_antenna,
                         const SciDetection& detection, const ResourcePool& pool, int max_turbo_iter = 8,
                         int chest_freq_window = 1);

}  // namespace sidelink::phy

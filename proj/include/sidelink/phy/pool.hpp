#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sidelink::phy {

enum class Adjacency { Adjacent, NonAdjacent };

// Sidelink resource pool for one 10 MHz carrier, 48 PRBs, 14-symbol subframe.
struct ResourcePool {
    double bandwidth_hz = 10e6;
    double subcarrier_spacing_hz = 15e3;
    int n_prb = 48;
    int prb_size = 12;
    int sci_prbs = 2;
    // Adjacent mode: subchannels tile the whole pool and each contains its own
    // PSCCH PRB pair; size must divide n_prb and exceed sci_prbs.
    // Non-adjacent mode: subchannels tile the PSSCH region (n_prb - sci_prbs).
    int subchannel_size_prbs = 48;
    Adjacency adjacency = Adjacency::Adjacent;
    double subframe_duration_s = 1e-3;
    int symbols_per_subframe = 14;
    // Treat the last SC-FDMA symbol as an unused guard. Off by default: the
    // full 10 data symbols per non-DMRS PRB column are used.
    bool guard_symbol = false;
    // Non-adjacent mode PSSCH start PRB (adjacent mode uses sci_prbs).
    int pssch_start_prb = 2;

    int fft_size = 1024;
    double sample_rate_hz = 15.36e6;

    int n_subcarriers() const { return n_prb * prb_size; }

    std::vector<int> dmrs_symbols() const { return {2, 5, 8, 11}; }

    std::vector<int> data_symbols() const {
        std::vector<int> out;
        int last = symbols_per_subframe - (guard_symbol ? 1 : 0);
        for (int l = 0; l < last; ++l) {
            if (l == 2 || l == 5 || l == 8 || l == 11) continue;
            out.push_back(l);
        }
        return out;
    }

    int n_data_symbols() const { return static_cast<int>(data_symbols().size()); }

    int n_subchannels() const {
        return adjacency == Adjacency::Adjacent ? n_prb / subchannel_size_prbs
                                                : (n_prb - sci_prbs) / subchannel_size_prbs;
    }

    // PRBs carrying PSSCH data in the link under simulation.
    int pssch_prb_start() const { return adjacency == Adjacency::Adjacent ? sci_prbs : pssch_start_prb; }
    int pssch_n_prbs() const {
        return adjacency == Adjacency::Adjacent ? subchannel_size_prbs - sci_prbs : subchannel_size_prbs;
    }

    void validate() const {
        if (n_prb <= 0 || prb_size <= 0 || sci_prbs != 2) throw std::invalid_argument("pool: bad PRB layout");
        if (n_prb * prb_size > fft_size) throw std::invalid_argument("pool: grid wider than FFT");
        if (symbols_per_subframe != 14) throw std::invalid_argument("pool: normal CP requires 14 symbols");
        if (adjacency == Adjacency::Adjacent) {
            if (subchannel_size_prbs <= sci_prbs || n_prb % subchannel_size_prbs != 0)
                throw std::invalid_argument("pool: adjacent subchannel size must divide n_prb and exceed sci_prbs");
        } else {
            if (subchannel_size_prbs <= 0 || (n_prb - sci_prbs) % subchannel_size_prbs != 0)
                throw std::invalid_argument("pool: subchannel size must divide usable PSSCH PRBs");
            if (pssch_start_prb < sci_prbs || pssch_start_prb + pssch_n_prbs() > n_prb)
                throw std::invalid_argument("pool: PSSCH allocation outside pool");
        }
    }
};

// Sidelink control information, format 1. Serialised to 32 bits:
//   mcs:5 | resource_indication:8 | time_resource_pattern:7 |
//   group_destination_id:10 | frequency_hopping:1 | retransmission:1
struct SciMessage {
    uint32_t mcs = 10;
    uint32_t resource_indication = 0;
    uint32_t time_resource_pattern = 0;
    uint32_t group_destination_id = 510;
    uint32_t frequency_hopping_flag = 0;
    uint32_t retransmission_opportunity = 0;

    static constexpr int kBits = 32;

    std::vector<uint8_t> pack() const;
    static SciMessage unpack(const std::vector<uint8_t>& bits);
    bool operator==(const SciMessage&) const = default;
};

}  // namespace sidelink::phy

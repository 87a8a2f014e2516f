#pragma once

#include <atomic>
#include <functional>
#include <optional>

#include "sidelink/l2s/table.hpp"
#include "sidelink/sl/scenario.hpp"

namespace sidelink::sl {

// Offered spectral efficiency: packet_bits * n_ue * period / bandwidth.
double spectral_efficiency(double packet_bits, double n_ue, double period_hz, double bw_hz);

// Grid-derived spectral efficiency of the QPSK rate-1/3 configuration:
// 2 * (1/3) * (non-guard symbol fraction) * (data PRB fraction).
double se_qpsk_third(const phy::ResourcePool& pool);

// Number of UEs the system sustains at the given spectral efficiency.
int ue_supported(double se, double bw_hz, double packet_bits, double period_hz);

struct TxAssignment {
    std::vector<int> tx_ids;         // transmitting vehicles, sorted by position
    std::vector<int> subchannel;     // parallel to tx_ids
    int n_subchannels = 0;

    std::optional<int> subchannel_of(int tx_id) const {
        for (std::size_t i = 0; i < tx_ids.size(); ++i)
            if (tx_ids[i] == tx_id) return subchannel[i];
        return std::nullopt;
    }
};

// Spreads the transmitters over the pool subchannels, maximising co-channel
// reuse distance: transmitters sorted along the road take subchannels
// round-robin.
TxAssignment assign_resources(const Topology& topo, const phy::ResourcePool& pool,
                              const std::vector<int>& tx_ids);

struct LinkBudget {
    int rx_id = 0;
    double wanted_power_dbm = 0;
    double interference_power_dbm = 0;  // -inf when no co-channel transmitter
    double noise_power_dbm = 0;
    double sinr_db = 0;
};

double sinr_db(double wanted_dbm, double interference_dbm, double noise_dbm);

// Total co-channel interference at `rx` when `wanted_tx` transmits, linear
// sum over every other co-channel transmitter. Returns -inf when none.
double interference_power_dbm(const Topology& topo, int rx_id, int wanted_tx,
                              const TxAssignment& assignment, const ScenarioConfig& cfg,
                              uint64_t shadow_seed);

struct PerRx {
    int rx_id = 0;
    double sinr_db = 0;
    double bler = 0;
    bool passed_threshold = false;
    bool random_test_pass = false;
};

struct PrrResult {
    double prr = 0;
    int counter_success = 0;
    int n_ue_in_range = 0;
    int ue_supported = 0;
    bool undefined = false;  // no receiver in range
    bool clamped = false;    // step-6 product exceeded 1
    std::vector<PerRx> per_rx;
    uint64_t drop_seed = 0;
};

// Uniform draw source for the step-4 random test, injectable for unit tests.
using UniformSource = std::function<double(int rx_id)>;

// PRR of one tagged transmission following the six-step procedure: SINR,
// table BLER, 1% threshold, uniform random test, success count, and
// min(1, (counter/No.UE) * (UE_supported/No.UE)).
PrrResult prr_single_drop(const Topology& topo, int tx_id, const l2s::L2sTable& table,
                          const ScenarioConfig& cfg, const TxAssignment& assignment, uint64_t drop_seed,
                          const UniformSource& draw = nullptr);

struct SweepPoint {
    double ivd_m = 0;
    double velocity_kmh = 0;
    double period_hz = 0;
    double mean_prr = 0;
    double ci95 = 0;
    int drops = 0;
    int ue_supported = 0;
    double n_ue_mean = 0;
    double clamp_fraction = 0;  // fraction of tagged transmissions clamped at 1
};

struct PrrSweep {
    std::vector<double> ivd_list;
    std::vector<double> velocity_list;
    std::vector<double> period_list;
    int n_drops = 200;
};

// Full campaign: for every (ivd, velocity, period) runs n_drops independent
// topologies; within each drop every interior vehicle takes a turn as the
// tagged transmitter. Aggregation is deterministic in (cfg, seed).
std::vector<SweepPoint> prr_campaign(const ScenarioConfig& base_cfg, const l2s::L2sTable& table,
                                     const PrrSweep& sweep, uint64_t seed, unsigned workers = 1,
                                     const std::atomic<bool>* cancel = nullptr);

}  // namespace sidelink::sl

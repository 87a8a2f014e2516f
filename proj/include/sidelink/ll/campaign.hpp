#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "sidelink/phy/pool.hpp"

namespace sidelink::ll {

struct CampaignConfig {
    std::vector<double> snr_grid_db;       // strictly increasing
    std::vector<double> velocities_kmh;    // table rows
    int blocks_per_point = 2000;
    int min_errors = 50;                   // early stop once reached at >= blocks/4
    uint64_t seed = 1;
    phy::ResourcePool pool;
    double carrier_hz = 5.9e9;
    int max_turbo_iter = 8;
    int chest_freq_window = 7;
    // Inclusive definition: a data block fails when control or data CRC fails.
    bool count_control_in_bler = true;
    unsigned workers = 1;

    static std::vector<double> default_snr_grid() {
        std::vector<double> g;
        for (int s = -10; s <= 20; ++s) g.push_back(s);
        return g;
    }
    static std::vector<double> default_velocities() { return {100, 260, 350, 400, 450, 500}; }

    CampaignConfig() : snr_grid_db(default_snr_grid()), velocities_kmh(default_velocities()) {}

    void validate() const;
};

struct BlerPoint {
    double snr_db = 0;
    double velocity_kmh = 0;
    double pscch_bler = 0;
    double pssch_bler = 0;
    int blocks = 0;
    int errors = 0;  // PSSCH errors under the configured definition
    double ci95_halfwidth = 0;
};

// 95% Wilson score interval half-width for `errors` failures in `blocks`.
double wilson_halfwidth(int errors, int blocks);

// Pool-adjacent-violators regression onto non-increasing sequences.
std::vector<double> isotonic_non_increasing(const std::vector<double>& y);

// One Monte-Carlo point: independent subframes with fresh payload, fading
// segment and random cyclic shift, stopping early once min_errors have been
// seen at a quarter of the block budget. Streams derive from
// (seed, snr index, velocity index, block index) so results are independent
// of execution order.
BlerPoint run_point(const CampaignConfig& cfg, std::size_t snr_idx, std::size_t vel_idx);

struct SweepResult {
    std::vector<BlerPoint> points;  // velocity-major, then SNR
    std::vector<std::vector<double>> bler_raw;       // [velocity][snr]
    std::vector<std::vector<double>> bler_isotonic;  // per-row PAV smoothing
    std::vector<std::vector<double>> pscch_bler;     // raw control-only BLER
};

// Cancellation (when provided) is polled between points; cancelled points
// report zero blocks and the result is a usable partial sweep.
SweepResult run_sweep(const CampaignConfig& cfg, const std::atomic<bool>* cancel = nullptr);

}  // namespace sidelink::ll

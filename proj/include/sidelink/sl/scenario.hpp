#pragma once

#include <cstdint>
#include <vector>

#include "sidelink/phy/pool.hpp"

namespace sidelink::sl {

enum class PathlossModel { WinnerB1, WinnerD1 };
enum class PlacementMode { Deterministic, Jitter };

struct ScenarioConfig {
    double highway_length_m = 3000;
    int lanes = 6;  // 3 per direction
    double lane_width_m = 4;
    double isd_m = 1732;
    double bs_height_m = 35;
    double ue_height_m = 1.5;
    double carrier_hz = 5.9e9;
    double bandwidth_hz = 10e6;
    double tx_power_dbm = 24;
    double tx_ant_gain_db = 0;
    double rx_ant_gain_db = 3;
    double noise_figure_db = 9;
    double comm_range_m = 400;
    double ivd_m = 100;
    double velocity_kmh = 100;
    int packet_bytes = 256;
    double tx_period_hz = 10;
    double prr_threshold_bler = 0.01;

    double shadow_sigma_db = 3.0;
    PathlossModel pathloss_model = PathlossModel::WinnerB1;
    PlacementMode placement = PlacementMode::Deterministic;
    // Channel-load rate for interferer activity (nominal CAM rate). The
    // tx_period_hz above enters the capacity equations only.
    double cam_rate_hz = 10;
    phy::ResourcePool pool = sl_default_pool();

    static phy::ResourcePool sl_default_pool() {
        phy::ResourcePool p;
        p.adjacency = phy::Adjacency::Adjacent;
        p.subchannel_size_prbs = 16;  // three subchannels across 48 PRBs
        return p;
    }

    void validate() const;
};

struct Vehicle {
    int id = 0;
    double x = 0, y = 0;
    int lane = 0;
    int direction = 1;  // +1 or -1 along x
    double velocity_kmh = 0;
};

struct BaseStation {
    int id = 0;
    double x = 0, y = 0;
};

struct Topology {
    std::vector<Vehicle> vehicles;
    std::vector<BaseStation> base_stations;
};

// Lane-by-lane placement at IVD spacing with a seeded common offset per lane
// (plus per-gap +/-10% jitter in Jitter mode); base stations anchored at x=0
// every ISD along the segment.
Topology build_topology(const ScenarioConfig& cfg, uint64_t seed);

std::vector<int> neighbors_in_range(const Topology& topo, int tx_id, double range_m);

double distance_m(const Vehicle& a, const Vehicle& b);

// WINNER II LOS pathloss with the two-slope breakpoint extension. Distances
// below 1 m clamp to 1 m. Effective antenna heights are h - 1 m floored at
// 1.5 m so vehicle-height links keep their breakpoint beyond the first
// hundred metres; the second slope continues the first branch at 40 dB/decade.
double pathloss_db(double d_m, const ScenarioConfig& cfg);

// Zero-mean log-normal draw for an ordered (tx, rx) link, deterministic in
// (seed, tx, rx).
double shadow_fading_db(const ScenarioConfig& cfg, uint64_t seed, int tx_id, int rx_id);

double rx_power_dbm(double distance_m, const ScenarioConfig& cfg, double shadow_db);

double noise_power_dbm(const ScenarioConfig& cfg);

}  // namespace sidelink::sl

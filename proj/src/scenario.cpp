#include "sidelink/sl/scenario.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "sidelink/common.hpp"

namespace sidelink::sl {

void ScenarioConfig::validate() const {
    if (highway_length_m <= 0 || lane_width_m <= 0 || ivd_m <= 0 || comm_range_m <= 0)
        throw std::invalid_argument("scenario: geometry must be positive");
    if (lanes <= 0 || lanes % 2 != 0) throw std::invalid_argument("scenario: lanes must be positive and even");
    if (prr_threshold_bler <= 0 || prr_threshold_bler >= 1)
        throw std::invalid_argument("scenario: PRR threshold in (0,1)");
    if (ivd_m > highway_length_m) throw std::invalid_argument("scenario: IVD exceeds highway length");
    if (packet_bytes <= 0 || tx_period_hz <= 0 || bandwidth_hz <= 0)
        throw std::invalid_argument("scenario: traffic parameters must be positive");
    pool.validate();
}

Topology build_topology(const ScenarioConfig& cfg, uint64_t seed) {
    cfg.validate();
    Topology topo;
    int id = 0;
    for (int lane = 0; lane < cfg.lanes; ++lane) {
        std::mt19937_64 rng(derive_seed(seed, 0xacede, static_cast<uint64_t>(lane)));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double offset = uni(rng) * cfg.ivd_m;
        int direction = lane < cfg.lanes / 2 ? 1 : -1;
        double y = cfg.lane_width_m * (lane + 0.5);
        double x = offset;
        while (x <= cfg.highway_length_m) {
            Vehicle v;
            v.id = id++;
            v.x = x;
            v.y = y;
            v.lane = lane;
            v.direction = direction;
            v.velocity_kmh = cfg.velocity_kmh;
            topo.vehicles.push_back(v);
            double gap = cfg.ivd_m;
            if (cfg.placement == PlacementMode::Jitter) gap *= 1.0 + 0.2 * (uni(rng) - 0.5);
            x += gap;
        }
    }
    int bs_id = 0;
    for (double x = 0; x <= cfg.highway_length_m; x += cfg.isd_m) {
        topo.base_stations.push_back(BaseStation{bs_id++, x, -20.0});
    }
    return topo;
}

double distance_m(const Vehicle& a, const Vehicle& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

std::vector<int> neighbors_in_range(const Topology& topo, int tx_id, double range_m) {
    const Vehicle& tx = topo.vehicles.at(static_cast<std::size_t>(tx_id));
    std::vector<int> out;
    for (const auto& v : topo.vehicles) {
        if (v.id == tx_id) continue;
        if (distance_m(tx, v) <= range_m) out.push_back(v.id);
    }
    return out;
}

double pathloss_db(double d_m, const ScenarioConfig& cfg) {
    double d = std::max(d_m, 1.0);
    double f_ghz = cfg.carrier_hz / 1e9;
    double a, b, fterm;
    switch (cfg.pathloss_model) {
        case PathlossModel::WinnerB1:
            a = 22.7;
            b = 41.0;
            fterm = 20.0 * std::log10(f_ghz / 5.0);
            break;
        case PathlossModel::WinnerD1:
            a = 21.5;
            b = 44.2;
            fterm = 20.0 * std::log10(f_ghz / 5.0);
            break;
        default:
            throw std::logic_error("pathloss: unknown model");
    }
    double h_eff_tx = std::max(cfg.ue_height_m - 1.0, 1.5);
    double h_eff_rx = h_eff_tx;
    double d_bp = 4.0 * h_eff_tx * h_eff_rx * cfg.carrier_hz / kSpeedOfLight;
    if (d <= d_bp) return a * std::log10(d) + b + fterm;
    double pl_bp = a * std::log10(d_bp) + b + fterm;
    return pl_bp + 40.0 * std::log10(d / d_bp);
}

double shadow_fading_db(const ScenarioConfig& cfg, uint64_t seed, int tx_id, int rx_id) {
    if (cfg.shadow_sigma_db == 0.0) return 0.0;
    // Counter-based draw: Box-Muller over two splitmix64 uniforms. Cheap
    // enough for the millions of link draws a campaign makes, deterministic
    // in (seed, tx, rx).
    uint64_t s = derive_seed(seed, 0x5aad0ULL, static_cast<uint64_t>(tx_id), static_cast<uint64_t>(rx_id));
    uint64_t a = splitmix64(s), b = splitmix64(a ^ 0x9e3779b97f4a7c15ULL);
    double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    double n = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    return cfg.shadow_sigma_db * n;
}

double rx_power_dbm(double distance, const ScenarioConfig& cfg, double shadow_db) {
    return cfg.tx_power_dbm + cfg.rx_ant_gain_db + cfg.tx_ant_gain_db - pathloss_db(distance, cfg) - shadow_db;
}

double noise_power_dbm(const ScenarioConfig& cfg) {
    return -174.0 + cfg.noise_figure_db + 10.0 * std::log10(cfg.bandwidth_hz);
}

}  // namespace sidelink::sl

#include "sidelink/cli/support.hpp"

#include <json.hpp>

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "sidelink/phy/chain.hpp"

namespace sidelink::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

phy::ResourcePool pool_from_json(const json& j, phy::ResourcePool base) {
    phy::ResourcePool p = base;
    if (j.contains("n_prb")) p.n_prb = j.at("n_prb").get<int>();
    if (j.contains("sci_prbs")) p.sci_prbs = j.at("sci_prbs").get<int>();
    if (j.contains("subchannel_size_prbs")) p.subchannel_size_prbs = j.at("subchannel_size_prbs").get<int>();
    if (j.contains("adjacency")) {
        std::string a = j.at("adjacency").get<std::string>();
        if (a == "adjacent")
            p.adjacency = phy::Adjacency::Adjacent;
        else if (a == "non_adjacent")
            p.adjacency = phy::Adjacency::NonAdjacent;
        else
            throw std::invalid_argument("config: adjacency must be adjacent|non_adjacent");
    }
    if (j.contains("guard_symbol")) p.guard_symbol = j.at("guard_symbol").get<bool>();
    if (j.contains("pssch_start_prb")) p.pssch_start_prb = j.at("pssch_start_prb").get<int>();
    if (j.contains("bandwidth_hz")) p.bandwidth_hz = j.at("bandwidth_hz").get<double>();
    return p;
}

ordered_json pool_to_json(const phy::ResourcePool& p) {
    ordered_json j;
    j["bandwidth_hz"] = p.bandwidth_hz;
    j["n_prb"] = p.n_prb;
    j["sci_prbs"] = p.sci_prbs;
    j["subchannel_size_prbs"] = p.subchannel_size_prbs;
    j["adjacency"] = p.adjacency == phy::Adjacency::Adjacent ? "adjacent" : "non_adjacent";
    j["guard_symbol"] = p.guard_symbol;
    j["pssch_start_prb"] = p.pssch_start_prb;
    return j;
}

template <typename T>
void maybe(const json& j, const char* key, T& slot) {
    if (j.contains(key)) slot = j.at(key).get<T>();
}

}  // namespace

RunConfig::RunConfig() {
    sweep.ivd_list = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    sweep.velocity_list = {100, 500};
    sweep.period_list = {10, 20};
    sweep.n_drops = 200;
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    RunConfig cfg;
    try {
        maybe(j, "seed", cfg.seed);
        if (j.contains("ll")) {
            const json& l = j.at("ll");
            if (l.contains("snr_grid_db")) {
                if (l.at("snr_grid_db").is_object()) {
                    double lo = l.at("snr_grid_db").at("min").get<double>();
                    double hi = l.at("snr_grid_db").at("max").get<double>();
                    double st = l.at("snr_grid_db").at("step").get<double>();
                    cfg.ll.snr_grid_db.clear();
                    for (double s = lo; s <= hi + 1e-9; s += st) cfg.ll.snr_grid_db.push_back(s);
                } else {
                    cfg.ll.snr_grid_db = l.at("snr_grid_db").get<std::vector<double>>();
                }
            }
            maybe(l, "velocities_kmh", cfg.ll.velocities_kmh);
            maybe(l, "blocks_per_point", cfg.ll.blocks_per_point);
            maybe(l, "min_errors", cfg.ll.min_errors);
            maybe(l, "max_turbo_iter", cfg.ll.max_turbo_iter);
            maybe(l, "chest_freq_window", cfg.ll.chest_freq_window);
            maybe(l, "count_control_in_bler", cfg.ll.count_control_in_bler);
            maybe(l, "carrier_hz", cfg.ll.carrier_hz);
            if (l.contains("pool")) cfg.ll.pool = pool_from_json(l.at("pool"), cfg.ll.pool);
        }
        if (j.contains("sl")) {
            const json& s = j.at("sl");
            maybe(s, "highway_length_m", cfg.sl.highway_length_m);
            maybe(s, "lanes", cfg.sl.lanes);
            maybe(s, "lane_width_m", cfg.sl.lane_width_m);
            maybe(s, "isd_m", cfg.sl.isd_m);
            maybe(s, "bs_height_m", cfg.sl.bs_height_m);
            maybe(s, "ue_height_m", cfg.sl.ue_height_m);
            maybe(s, "carrier_hz", cfg.sl.carrier_hz);
            maybe(s, "bandwidth_hz", cfg.sl.bandwidth_hz);
            maybe(s, "tx_power_dbm", cfg.sl.tx_power_dbm);
            maybe(s, "tx_ant_gain_db", cfg.sl.tx_ant_gain_db);
            maybe(s, "rx_ant_gain_db", cfg.sl.rx_ant_gain_db);
            maybe(s, "noise_figure_db", cfg.sl.noise_figure_db);
            maybe(s, "comm_range_m", cfg.sl.comm_range_m);
            maybe(s, "ivd_m", cfg.sl.ivd_m);
            maybe(s, "velocity_kmh", cfg.sl.velocity_kmh);
            maybe(s, "packet_bytes", cfg.sl.packet_bytes);
            maybe(s, "tx_period_hz", cfg.sl.tx_period_hz);
            maybe(s, "prr_threshold_bler", cfg.sl.prr_threshold_bler);
            maybe(s, "shadow_sigma_db", cfg.sl.shadow_sigma_db);
            maybe(s, "cam_rate_hz", cfg.sl.cam_rate_hz);
            if (s.contains("pathloss_model")) {
                std::string m = s.at("pathloss_model").get<std::string>();
                if (m == "winner_b1")
                    cfg.sl.pathloss_model = sl::PathlossModel::WinnerB1;
                else if (m == "winner_d1")
                    cfg.sl.pathloss_model = sl::PathlossModel::WinnerD1;
                else
                    throw std::invalid_argument("config: pathloss_model must be winner_b1|winner_d1");
            }
            if (s.contains("placement")) {
                std::string m = s.at("placement").get<std::string>();
                if (m == "deterministic")
                    cfg.sl.placement = sl::PlacementMode::Deterministic;
                else if (m == "jitter")
                    cfg.sl.placement = sl::PlacementMode::Jitter;
                else
                    throw std::invalid_argument("config: placement must be deterministic|jitter");
            }
            if (s.contains("pool")) cfg.sl.pool = pool_from_json(s.at("pool"), cfg.sl.pool);
            if (s.contains("sweep")) {
                const json& w = s.at("sweep");
                maybe(w, "ivd_list", cfg.sweep.ivd_list);
                maybe(w, "velocity_list", cfg.sweep.velocity_list);
                maybe(w, "period_list", cfg.sweep.period_list);
                maybe(w, "n_drops", cfg.sweep.n_drops);
            }
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config field error: ") + e.what());
    }
    return cfg;
}

std::string dump_config(const RunConfig& cfg) {
    ordered_json j;
    j["seed"] = cfg.seed;
    ordered_json l;
    l["snr_grid_db"] = cfg.ll.snr_grid_db;
    l["velocities_kmh"] = cfg.ll.velocities_kmh;
    l["blocks_per_point"] = cfg.ll.blocks_per_point;
    l["min_errors"] = cfg.ll.min_errors;
    l["max_turbo_iter"] = cfg.ll.max_turbo_iter;
    l["chest_freq_window"] = cfg.ll.chest_freq_window;
    l["count_control_in_bler"] = cfg.ll.count_control_in_bler;
    l["carrier_hz"] = cfg.ll.carrier_hz;
    l["pool"] = pool_to_json(cfg.ll.pool);
    j["ll"] = l;
    ordered_json s;
    s["highway_length_m"] = cfg.sl.highway_length_m;
    s["lanes"] = cfg.sl.lanes;
    s["lane_width_m"] = cfg.sl.lane_width_m;
    s["isd_m"] = cfg.sl.isd_m;
    s["bs_height_m"] = cfg.sl.bs_height_m;
    s["ue_height_m"] = cfg.sl.ue_height_m;
    s["carrier_hz"] = cfg.sl.carrier_hz;
    s["bandwidth_hz"] = cfg.sl.bandwidth_hz;
    s["tx_power_dbm"] = cfg.sl.tx_power_dbm;
    s["tx_ant_gain_db"] = cfg.sl.tx_ant_gain_db;
    s["rx_ant_gain_db"] = cfg.sl.rx_ant_gain_db;
    s["noise_figure_db"] = cfg.sl.noise_figure_db;
    s["comm_range_m"] = cfg.sl.comm_range_m;
    s["ivd_m"] = cfg.sl.ivd_m;
    s["velocity_kmh"] = cfg.sl.velocity_kmh;
    s["packet_bytes"] = cfg.sl.packet_bytes;
    s["tx_period_hz"] = cfg.sl.tx_period_hz;
    s["prr_threshold_bler"] = cfg.sl.prr_threshold_bler;
    s["shadow_sigma_db"] = cfg.sl.shadow_sigma_db;
    s["cam_rate_hz"] = cfg.sl.cam_rate_hz;
    s["pathloss_model"] = cfg.sl.pathloss_model == sl::PathlossModel::WinnerB1 ? "winner_b1" : "winner_d1";
    s["placement"] = cfg.sl.placement == sl::PlacementMode::Deterministic ? "deterministic" : "jitter";
    s["pool"] = pool_to_json(cfg.sl.pool);
    ordered_json w;
    w["ivd_list"] = cfg.sweep.ivd_list;
    w["velocity_list"] = cfg.sweep.velocity_list;
    w["period_list"] = cfg.sweep.period_list;
    w["n_drops"] = cfg.sweep.n_drops;
    s["sweep"] = w;
    j["sl"] = s;
    return j.dump(2) + "\n";
}

std::string config_hash(const RunConfig& cfg) {
    std::string text = dump_config(cfg);
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string artifact_date() {
    std::time_t t;
    if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
    } else {
        t = std::time(nullptr);
    }
    char buf[64];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_bler_csv(const std::string& path, const std::vector<ll::BlerPoint>& points) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "snr_db,velocity_kmh,pscch_bler,pssch_bler,blocks,errors,ci95\n";
    f.precision(9);
    for (const auto& p : points) {
        f << p.snr_db << ',' << p.velocity_kmh << ',' << p.pscch_bler << ',' << p.pssch_bler << ','
          << p.blocks << ',' << p.errors << ',' << p.ci95_halfwidth << '\n';
    }
}

void write_bler_plot(const std::string& path, const ll::CampaignConfig& cfg, const ll::SweepResult& sweep) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "# SNR_dB log10_BLER, one block per velocity (isotonic values)\n";
    f.precision(9);
    for (std::size_t vi = 0; vi < cfg.velocities_kmh.size(); ++vi) {
        f << "# velocity_kmh " << cfg.velocities_kmh[vi] << "\n";
        for (std::size_t si = 0; si < cfg.snr_grid_db.size(); ++si) {
            double b = std::max(sweep.bler_isotonic[vi][si], 1e-6);
            f << cfg.snr_grid_db[si] << ' ' << std::log10(b) << '\n';
        }
        f << "\n\n";
    }
}

void write_prr_csv(const std::string& path, const std::vector<sl::SweepPoint>& points) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "ivd_m,velocity_kmh,period_hz,mean_prr,ci95,drops,ue_supported,n_ue_mean\n";
    f.precision(9);
    for (const auto& p : points) {
        f << p.ivd_m << ',' << p.velocity_kmh << ',' << p.period_hz << ',' << p.mean_prr << ',' << p.ci95
          << ',' << p.drops << ',' << p.ue_supported << ',' << p.n_ue_mean << '\n';
    }
}

void write_prr_plot(const std::string& path, const std::vector<sl::SweepPoint>& points) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "# IVD_m mean_PRR, one block per (velocity, period)\n";
    f.precision(9);
    double cur_v = -1, cur_p = -1;
    bool first = true;
    for (const auto& p : points) {
        if (p.velocity_kmh != cur_v || p.period_hz != cur_p) {
            if (!first) f << "\n\n";
            f << "# velocity_kmh " << p.velocity_kmh << " period_hz " << p.period_hz << "\n";
            cur_v = p.velocity_kmh;
            cur_p = p.period_hz;
            first = false;
        }
        f << p.ivd_m << ' ' << p.mean_prr << '\n';
    }
}

l2s::L2sTable make_table(const RunConfig& cfg, const ll::SweepResult& sweep) {
    l2s::L2sTable t;
    t.snr_grid_db = cfg.ll.snr_grid_db;
    t.velocities_kmh = cfg.ll.velocities_kmh;
    t.bler = sweep.bler_isotonic;
    t.bler_raw = sweep.bler_raw;
    t.metadata["tool_version"] = kToolVersion;
    t.metadata["config_hash"] = config_hash(cfg);
    t.metadata["seed"] = std::to_string(cfg.seed);
    t.metadata["date"] = artifact_date();
    t.metadata["bler_definition"] =
        cfg.ll.count_control_in_bler ? "control_or_data_crc_failure" : "data_crc_failure_only";
    t.metadata["snr_reference"] = "mean_tx_waveform_power_per_antenna_unit_energy_channel";
    phy::LinkDims dims = phy::link_dims(cfg.ll.pool);
    t.metadata["tbs_bits"] = std::to_string(dims.tbs_bits);
    t.metadata["code_rate"] = std::to_string(dims.code_rate);
    std::ostringstream se;
    se.precision(9);
    se << sl::se_qpsk_third(cfg.sl.pool);
    t.metadata["se_qpsk_third"] = se.str();
    return t;
}

std::atomic<bool>& interrupt_flag() {
    static std::atomic<bool> flag{false};
    return flag;
}

}  // namespace sidelink::cli

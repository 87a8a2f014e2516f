#include "sidelink/sl/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "sidelink/common.hpp"

namespace sidelink::sl {

double spectral_efficiency(double packet_bits, double n_ue, double period_hz, double bw_hz) {
    if (packet_bits <= 0 || period_hz <= 0 || bw_hz <= 0)
        throw std::invalid_argument("spectral_efficiency: non-positive parameter");
    if (n_ue < 0) throw std::invalid_argument("spectral_efficiency: negative UE count");
    return packet_bits * n_ue * period_hz / bw_hz;
}

double se_qpsk_third(const phy::ResourcePool& pool) {
    double sym_fraction = static_cast<double>(pool.symbols_per_subframe - 1) / pool.symbols_per_subframe;
    double prb_fraction = static_cast<double>(pool.n_prb - pool.sci_prbs) / pool.n_prb;
    return 2.0 * (1.0 / 3.0) * sym_fraction * prb_fraction;
}

int ue_supported(double se, double bw_hz, double packet_bits, double period_hz) {
    if (se <= 0 || bw_hz <= 0 || packet_bits <= 0 || period_hz <= 0)
        throw std::invalid_argument("ue_supported: non-positive parameter");
    return static_cast<int>(std::floor(se * bw_hz / (packet_bits * period_hz) * (1.0 + 1e-12) + 1e-9));
}

TxAssignment assign_resources(const Topology& topo, const phy::ResourcePool& pool,
                              const std::vector<int>& tx_ids) {
    TxAssignment a;
    a.n_subchannels = pool.n_subchannels();
    a.tx_ids = tx_ids;
    std::sort(a.tx_ids.begin(), a.tx_ids.end(), [&](int l, int r) {
        const auto& vl = topo.vehicles.at(static_cast<std::size_t>(l));
        const auto& vr = topo.vehicles.at(static_cast<std::size_t>(r));
        return vl.x != vr.x ? vl.x < vr.x : l < r;
    });
    a.subchannel.resize(a.tx_ids.size());
    for (std::size_t i = 0; i < a.tx_ids.size(); ++i)
        a.subchannel[i] = static_cast<int>(i % static_cast<std::size_t>(a.n_subchannels));
    return a;
}

double sinr_db(double wanted_dbm, double interference_dbm, double noise_dbm) {
    if (!std::isfinite(wanted_dbm) || !std::isfinite(noise_dbm))
        throw std::invalid_argument("sinr_db: wanted and noise must be finite");
    double denom = db_to_lin(noise_dbm);
    if (std::isfinite(interference_dbm)) denom += db_to_lin(interference_dbm);
    return lin_to_db(db_to_lin(wanted_dbm) / denom);
}

double interference_power_dbm(const Topology& topo, int rx_id, int wanted_tx,
                              const TxAssignment& assignment, const ScenarioConfig& cfg,
                              uint64_t shadow_seed) {
    auto wanted_ch = assignment.subchannel_of(wanted_tx);
    if (!wanted_ch) throw std::invalid_argument("interference: wanted tx not assigned");
    const Vehicle& rx = topo.vehicles.at(static_cast<std::size_t>(rx_id));
    double linear_mw = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < assignment.tx_ids.size(); ++i) {
        int tx = assignment.tx_ids[i];
        if (tx == wanted_tx || tx == rx_id) continue;
        if (assignment.subchannel[i] != *wanted_ch) continue;
        const Vehicle& txv = topo.vehicles.at(static_cast<std::size_t>(tx));
        double shadow = shadow_fading_db(cfg, shadow_seed, tx, rx_id);
        linear_mw += db_to_lin(rx_power_dbm(distance_m(txv, rx), cfg, shadow));
        any = true;
    }
    return any ? lin_to_db(linear_mw) : -std::numeric_limits<double>::infinity();
}

PrrResult prr_single_drop(const Topology& topo, int tx_id, const l2s::L2sTable& table,
                          const ScenarioConfig& cfg, const TxAssignment& assignment, uint64_t drop_seed,
                          const UniformSource& draw) {
    PrrResult res;
    res.drop_seed = drop_seed;
    auto rx_ids = neighbors_in_range(topo, tx_id, cfg.comm_range_m);
    res.n_ue_in_range = static_cast<int>(rx_ids.size());
    res.ue_supported =
        ue_supported(se_qpsk_third(cfg.pool), cfg.bandwidth_hz, cfg.packet_bytes * 8.0, cfg.tx_period_hz);
    if (rx_ids.empty()) {
        res.undefined = true;
        return res;
    }

    const Vehicle& tx = topo.vehicles.at(static_cast<std::size_t>(tx_id));
    const double noise_dbm = noise_power_dbm(cfg);
    for (int rx_id : rx_ids) {
        PerRx rec;
        rec.rx_id = rx_id;
        const Vehicle& rx = topo.vehicles.at(static_cast<std::size_t>(rx_id));
        double shadow = shadow_fading_db(cfg, drop_seed, tx_id, rx_id);
        double wanted = rx_power_dbm(distance_m(tx, rx), cfg, shadow);
        double interf = interference_power_dbm(topo, rx_id, tx_id, assignment, cfg, drop_seed);
        rec.sinr_db = sinr_db(wanted, interf, noise_dbm);
        rec.bler = l2s::lookup(table, rec.sinr_db, rx.velocity_kmh);
        rec.passed_threshold = rec.bler < cfg.prr_threshold_bler;
        if (rec.passed_threshold) {
            double u;
            if (draw) {
                u = draw(rx_id);
            } else {
                uint64_t s = derive_seed(drop_seed, static_cast<uint64_t>(tx_id),
                                         static_cast<uint64_t>(rx_id), 0x7e57);
                u = static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
            }
            rec.random_test_pass = rec.bler < u;
            if (rec.random_test_pass) ++res.counter_success;
        }
        res.per_rx.push_back(rec);
    }

    double n_ue = static_cast<double>(res.n_ue_in_range);
    double product = (res.counter_success / n_ue) * (res.ue_supported / n_ue);
    res.clamped = product > 1.0;
    res.prr = std::min(1.0, product);
    return res;
}

std::vector<SweepPoint> prr_campaign(const ScenarioConfig& base_cfg, const l2s::L2sTable& table,
                                     const PrrSweep& sweep, uint64_t seed, unsigned workers,
                                     const std::atomic<bool>* cancel) {
    if (sweep.n_drops < 1) throw std::invalid_argument("prr_campaign: n_drops >= 1");
    std::vector<SweepPoint> points;
    for (double ivd : sweep.ivd_list)
        for (double vel : sweep.velocity_list)
            for (double period : sweep.period_list)
                points.push_back(SweepPoint{ivd, vel, period, 0, 0, sweep.n_drops, 0, 0, 0});

    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        SweepPoint& pt = points[pi];
        if (cancel && cancel->load()) {
            pt.drops = 0;  // not run
            continue;
        }
        ScenarioConfig cfg = base_cfg;
        cfg.ivd_m = pt.ivd_m;
        cfg.velocity_kmh = pt.velocity_kmh;
        cfg.tx_period_hz = pt.period_hz;
        cfg.validate();

        std::vector<double> drop_prr(static_cast<std::size_t>(sweep.n_drops), 0.0);
        std::vector<double> drop_nue(drop_prr.size(), 0.0);
        std::vector<double> drop_clamp(drop_prr.size(), 0.0);
        std::vector<uint8_t> drop_valid(drop_prr.size(), 0);

        parallel_for(drop_prr.size(), workers, [&](std::size_t di) {
            uint64_t drop_seed = derive_seed(seed, pi, di, 0xd409);
            Topology topo = build_topology(cfg, drop_seed);
            // Channel-load model: vehicles emit CAMs at the nominal rate;
            // each is active in the evaluated subframe with probability
            // cam_rate / subframes-per-second.
            double p_active = std::min(1.0, cfg.cam_rate_hz * cfg.pool.subframe_duration_s);
            std::mt19937_64 rng(derive_seed(drop_seed, 0x7fa, 0));
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            std::vector<int> active;
            for (const auto& v : topo.vehicles)
                if (uni(rng) < p_active) active.push_back(v.id);

            double margin = cfg.comm_range_m;
            double acc = 0, nue_acc = 0, clamp_acc = 0;
            int tagged_count = 0;
            for (const auto& v : topo.vehicles) {
                if (v.x < margin || v.x > cfg.highway_length_m - margin) continue;
                std::vector<int> txs = active;
                if (std::find(txs.begin(), txs.end(), v.id) == txs.end()) txs.push_back(v.id);
                TxAssignment assignment = assign_resources(topo, cfg.pool, txs);
                PrrResult r = prr_single_drop(topo, v.id, table, cfg, assignment, drop_seed);
                if (r.undefined) continue;
                acc += r.prr;
                nue_acc += r.n_ue_in_range;
                clamp_acc += r.clamped ? 1.0 : 0.0;
                ++tagged_count;
            }
            if (tagged_count > 0) {
                drop_prr[di] = acc / tagged_count;
                drop_nue[di] = nue_acc / tagged_count;
                drop_clamp[di] = clamp_acc / tagged_count;
                drop_valid[di] = 1;
            }
        });

        double mean = 0, nue = 0, clampf = 0;
        int n = 0;
        for (std::size_t di = 0; di < drop_prr.size(); ++di) {
            if (!drop_valid[di]) continue;
            mean += drop_prr[di];
            nue += drop_nue[di];
            clampf += drop_clamp[di];
            ++n;
        }
        if (n > 0) {
            mean /= n;
            nue /= n;
            clampf /= n;
        }
        double var = 0;
        for (std::size_t di = 0; di < drop_prr.size(); ++di)
            if (drop_valid[di]) var += (drop_prr[di] - mean) * (drop_prr[di] - mean);
        var = n > 1 ? var / (n - 1) : 0.0;

        pt.mean_prr = mean;
        pt.ci95 = n > 0 ? 1.959963984540054 * std::sqrt(var / n) : 0.0;
        pt.drops = n;
        pt.n_ue_mean = nue;
        pt.clamp_fraction = clampf;
        pt.ue_supported =
            ue_supported(se_qpsk_third(cfg.pool), cfg.bandwidth_hz, cfg.packet_bytes * 8.0, cfg.tx_period_hz);
    }
    return points;
}

}  // namespace sidelink::sl

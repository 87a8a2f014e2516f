#include "sidelink/ll/campaign.hpp"

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "sidelink/channel/fading.hpp"
#include "sidelink/common.hpp"
#include "sidelink/phy/chain.hpp"
#include "sidelink/phy/scfdma.hpp"

namespace sidelink::ll {

void CampaignConfig::validate() const {
    if (snr_grid_db.empty() || velocities_kmh.empty()) throw std::invalid_argument("campaign: empty grid");
    for (std::size_t i = 1; i < snr_grid_db.size(); ++i)
        if (snr_grid_db[i] <= snr_grid_db[i - 1]) throw std::invalid_argument("campaign: SNR grid must increase");
    if (blocks_per_point < 100) throw std::invalid_argument("campaign: blocks_per_point >= 100");
    if (min_errors < 1) throw std::invalid_argument("campaign: min_errors >= 1");
    pool.validate();
}

double wilson_halfwidth(int errors, int blocks) {
    if (blocks <= 0) return 0.0;
    const double z = 1.959963984540054;
    double n = blocks;
    double p = static_cast<double>(errors) / n;
    double z2 = z * z;
    return z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
}

std::vector<double> isotonic_non_increasing(const std::vector<double>& y) {
    // PAV on the reversed sequence enforces non-decreasing there, which is
    // non-increasing in the original orientation.
    std::vector<double> level;
    std::vector<double> weight;
    std::vector<double> rev(y.rbegin(), y.rend());
    for (double v : rev) {
        level.push_back(v);
        weight.push_back(1.0);
        while (level.size() > 1 && level[level.size() - 2] > level.back()) {
            double w = weight.back() + weight[weight.size() - 2];
            double m = (level.back() * weight.back() + level[level.size() - 2] * weight[weight.size() - 2]) / w;
            level.pop_back();
            weight.pop_back();
            level.back() = m;
            weight.back() = w;
        }
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < level.size(); ++i)
        out.insert(out.end(), static_cast<std::size_t>(weight[i]), level[i]);
    std::reverse(out.begin(), out.end());
    return out;
}

BlerPoint run_point(const CampaignConfig& cfg, std::size_t snr_idx, std::size_t vel_idx) {
    cfg.validate();
    const double snr_db = cfg.snr_grid_db.at(snr_idx);
    const double velocity = cfg.velocities_kmh.at(vel_idx);
    const phy::ResourcePool& pool = cfg.pool;
    const phy::LinkDims dims = phy::link_dims(pool);
    const channel::TdlProfile profile = channel::TdlProfile::eva();
    constexpr std::array<int, 4> kShifts = {0, 3, 6, 9};

    BlerPoint pt;
    pt.snr_db = snr_db;
    pt.velocity_kmh = velocity;

    int pscch_errors = 0, pssch_errors = 0, blocks = 0;
    for (int b = 0; b < cfg.blocks_per_point; ++b) {
        std::mt19937_64 rng(derive_seed(cfg.seed, snr_idx, vel_idx, static_cast<uint64_t>(b)));
        coding::BitVec tb = coding::random_bits(dims.tbs_bits, rng);
        phy::SciMessage sci;
        sci.resource_indication = static_cast<uint32_t>(rng() % 256);
        int shift = kShifts[rng() % 4];

        phy::ResourceGrid tx = phy::build_tx_grid(sci, tb, pool, shift);
        phy::Waveform wave = phy::scfdma_modulate(tx, pool);
        channel::FadingRealization fading(profile, velocity, cfg.carrier_hz, pool.sample_rate_hz, rng());
        auto faded = fading.apply(wave);
        const double ref_power = wave.mean_power();
        const double noise_var = snr_db >= 300.0 ? 1e-30 : ref_power * db_to_lin(-snr_db);
        auto rx0 = channel::add_awgn(faded[0], snr_db, ref_power, rng);
        auto rx1 = channel::add_awgn(faded[1], snr_db, ref_power, rng);

        phy::ResourceGrid g0 = phy::scfdma_demodulate(rx0, pool);
        phy::ResourceGrid g1 = phy::scfdma_demodulate(rx1, pool);
        std::vector<const phy::ResourceGrid*> ants = {&g0, &g1};

        auto det = phy::blind_decode_pscch(ants, noise_var, pool, cfg.chest_freq_window);
        bool ctrl_ok = det.has_value() && det->cyclic_shift == shift && det->sci == sci;
        bool data_ok = false;
        if (det.has_value()) {
            // Unsuccessfully decoded control discards the data, but a decode
            // is still attempted with whatever the SCI carried.
            auto data = phy::decode_pssch(ants, noise_var, *det, pool, cfg.max_turbo_iter, cfg.chest_freq_window);
            data_ok = data.crc_ok && data.payload == tb;
        }
        if (!ctrl_ok) ++pscch_errors;
        bool counted_error = cfg.count_control_in_bler ? (!ctrl_ok || !data_ok) : (det.has_value() && !data_ok);
        if (counted_error) ++pssch_errors;

        ++blocks;
        if (pssch_errors >= cfg.min_errors && blocks >= cfg.blocks_per_point / 4) break;
    }

    pt.blocks = blocks;
    pt.errors = pssch_errors;
    pt.pscch_bler = static_cast<double>(pscch_errors) / blocks;
    pt.pssch_bler = static_cast<double>(pssch_errors) / blocks;
    pt.ci95_halfwidth = wilson_halfwidth(pssch_errors, blocks);
    return pt;
}

SweepResult run_sweep(const CampaignConfig& cfg, const std::atomic<bool>* cancel) {
    cfg.validate();
    const std::size_t nv = cfg.velocities_kmh.size();
    const std::size_t ns = cfg.snr_grid_db.size();

    SweepResult res;
    res.points.resize(nv * ns);
    parallel_for(nv * ns, cfg.workers, [&](std::size_t i) {
        std::size_t vi = i / ns, si = i % ns;
        if (cancel && cancel->load()) {
            res.points[i].snr_db = cfg.snr_grid_db[si];
            res.points[i].velocity_kmh = cfg.velocities_kmh[vi];
            return;  // blocks == 0 marks the point as not run
        }
        res.points[i] = run_point(cfg, si, vi);
    });

    res.bler_raw.assign(nv, std::vector<double>(ns));
    res.pscch_bler.assign(nv, std::vector<double>(ns));
    for (std::size_t vi = 0; vi < nv; ++vi) {
        for (std::size_t si = 0; si < ns; ++si) {
            res.bler_raw[vi][si] = res.points[vi * ns + si].pssch_bler;
            res.pscch_bler[vi][si] = res.points[vi * ns + si].pscch_bler;
        }
    }
    res.bler_isotonic.resize(nv);
    for (std::size_t vi = 0; vi < nv; ++vi) res.bler_isotonic[vi] = isotonic_non_increasing(res.bler_raw[vi]);
    return res;
}

}  // namespace sidelink::ll

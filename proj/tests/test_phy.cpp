#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "sidelink/phy/chain.hpp"
#include "sidelink/phy/chest.hpp"
#include "sidelink/phy/dft.hpp"
#include "sidelink/phy/dmrs.hpp"
#include "sidelink/phy/qpsk.hpp"
#include "sidelink/phy/scfdma.hpp"

using namespace sidelink;
using namespace sidelink::phy;
using coding::BitVec;

namespace {

ResourcePool default_pool() { return ResourcePool{}; }

std::vector<cplx> random_symbols(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> v(n);
    for (auto& s : v) s = {g(rng), g(rng)};
    return v;
}

double rel_err(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(a[i]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

TEST_CASE("qpsk mapping anchor points and demap consistency") {
    BitVec bits = {0, 0, 0, 1, 1, 0, 1, 1};
    auto syms = qpsk_map(bits);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(syms[0].real() == doctest::Approx(s));
    CHECK(syms[0].imag() == doctest::Approx(s));
    CHECK(syms[1].real() == doctest::Approx(s));
    CHECK(syms[1].imag() == doctest::Approx(-s));
    CHECK(syms[2].real() == doctest::Approx(-s));
    CHECK(syms[3].real() == doctest::Approx(-s));
    CHECK(syms[3].imag() == doctest::Approx(-s));

    // Near-noiseless demap recovers bits through LLR signs.
    auto llrs = qpsk_soft_demap(syms, 1e-9);
    CHECK(coding::hard_decide(llrs) == bits);

    // Analytic max-log value at y = (+1+j)/sqrt(2), sigma^2 = 1:
    // LLR = (|y-s1|^2 - |y-s0|^2)/sigma^2 = 2.0 on each bit.
    auto one = qpsk_soft_demap({syms[0]}, 1.0);
    double y_re = syms[0].real();
    double d1 = (y_re + s) * (y_re + s), d0 = (y_re - s) * (y_re - s);
    CHECK(one[0] == doctest::Approx((d1 - d0) / 1.0));
    CHECK(one[0] == doctest::Approx(2.0));

    CHECK_THROWS_AS(qpsk_map(BitVec{1}), std::invalid_argument);
    CHECK_THROWS_AS(qpsk_soft_demap(syms, 0.0), std::invalid_argument);
}

TEST_CASE("transform precoding is unitary and invertible") {
    std::mt19937_64 rng(31);
    auto x = random_symbols(552 * 3, rng);
    auto y = transform_precode(x, 552);
    auto back = transform_deprecode(y, 552);
    CHECK(rel_err(x, back) < 1e-12);

    double ex = 0, ey = 0;
    for (auto& v : x) ex += std::norm(v);
    for (auto& v : y) ey += std::norm(v);
    CHECK(std::abs(ex - ey) / ex < 1e-9);

    // Constant block concentrates at the DC bin.
    std::vector<cplx> c(24, cplx{1.0, 0.0});
    auto sp = transform_precode(c, 24);
    CHECK(std::abs(sp[0]) == doctest::Approx(std::sqrt(24.0)));
    for (std::size_t i = 1; i < sp.size(); ++i) CHECK(std::abs(sp[i]) < 1e-9);

    CHECK_THROWS_AS(transform_precode(c, 7), std::invalid_argument);
}

TEST_CASE("dmrs constant magnitude, shift ramp, cross-correlation") {
    auto r0 = generate_dmrs(24, 0, SlChannel::Pscch);
    auto r6 = generate_dmrs(24, 6, SlChannel::Pscch);
    for (auto& v : r0) CHECK(std::abs(v) == doctest::Approx(1.0));

    // shift 6 vs shift 0: element-wise ramp exp(j*2*pi*6*n/12).
    for (std::size_t n = 0; n < r0.size(); ++n) {
        cplx expect = r0[n] * std::polar(1.0, 2.0 * kPi * 6.0 * static_cast<double>(n) / 12.0);
        CHECK(std::abs(r6[n] - expect) < 1e-9);
    }

    // Distinct shifts decorrelate relative to the autocorrelation peak.
    auto corr = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        cplx acc{0, 0};
        for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
        return std::abs(acc) / static_cast<double>(a.size());
    };
    auto r3 = generate_dmrs(24, 3, SlChannel::Pscch);
    CHECK(corr(r0, r0) == doctest::Approx(1.0));
    CHECK(corr(r0, r3) / corr(r0, r0) < 0.2);
    CHECK(corr(r0, r6) / corr(r0, r0) < 0.2);

    CHECK_THROWS_AS(generate_dmrs(24, 5, SlChannel::Pscch), std::invalid_argument);
}

TEST_CASE("grid occupancy census and power normalisation") {
    ResourcePool pool = default_pool();
    std::mt19937_64 rng(32);
    LinkDims d = link_dims(pool);
    BitVec tb = coding::random_bits(d.tbs_bits, rng);
    ResourceGrid grid = build_tx_grid(SciMessage{}, tb, pool, 3);

    std::size_t pscch = 0, pssch = 0, dmrs = 0;
    for (auto t : grid.tags) {
        pscch += t == CellTag::Pscch;
        pssch += t == CellTag::Pssch;
        dmrs += t == CellTag::Dmrs;
    }
    // 14 symbols - 4 DMRS = 10 data symbols per occupied subcarrier.
    CHECK(pscch == 2u * 12u * 10u);
    CHECK(pssch == 46u * 12u * 10u);
    CHECK(dmrs == 4u * (2u + 46u) * 12u);
    CHECK(grid.occupied_power() == doctest::Approx(1.0).epsilon(1e-9));

    // With the guard symbol enabled the census loses one symbol per column.
    ResourcePool guarded = pool;
    guarded.guard_symbol = true;
    LinkDims dg = link_dims(guarded);
    BitVec tbg = coding::random_bits(dg.tbs_bits, rng);
    ResourceGrid grid_g = build_tx_grid(SciMessage{}, tbg, guarded, 3);
    std::size_t pscch_g = 0;
    for (auto t : grid_g.tags) pscch_g += t == CellTag::Pscch;
    CHECK(pscch_g == 2u * 12u * 9u);
    for (int k = 0; k < grid_g.n_sc; ++k) CHECK(grid_g.tag(k, 13) == CellTag::Empty);
}

TEST_CASE("link dims: capacity-derived transport block") {
    ResourcePool pool = default_pool();
    LinkDims d = link_dims(pool);
    CHECK(d.e_pscch == 480u);
    CHECK(d.e_pssch == 11040u);
    CHECK(d.turbo_k == 3648u);
    CHECK(d.tbs_bits == 3624u);
    CHECK(d.code_rate == doctest::Approx(3648.0 / 11040.0));
}

TEST_CASE("scfdma sample count, sinusoid anchor, round trip") {
    ResourcePool pool = default_pool();
    CHECK(scfdma_samples_per_subframe(pool) == 15360u);

    // Single occupied subcarrier -> complex sinusoid at its frequency.
    ResourceGrid g(pool.n_subcarriers(), pool.symbols_per_subframe);
    int k0 = 300;
    g.at(k0, 0) = {1.0, 0.0};
    g.tag(k0, 0) = CellTag::Pssch;
    Waveform w = scfdma_modulate(g, pool);
    int bin = (k0 - pool.n_subcarriers() / 2 + pool.fft_size) % pool.fft_size;
    // Skip the CP: samples 80.. of symbol 0 follow exp(j*2*pi*bin*n/N)/sqrt(N).
    for (int n = 0; n < 32; ++n) {
        cplx expect = std::polar(1.0 / std::sqrt(1024.0), 2.0 * kPi * bin * n / 1024.0);
        CHECK(std::abs(w.samples[static_cast<std::size_t>(80 + n)] - expect) < 1e-12);
    }

    std::mt19937_64 rng(33);
    ResourceGrid full(pool.n_subcarriers(), pool.symbols_per_subframe);
    for (int l = 0; l < full.n_sym; ++l)
        for (int k = 0; k < full.n_sc; ++k) full.at(k, l) = random_symbols(1, rng)[0];
    Waveform wave = scfdma_modulate(full, pool);
    ResourceGrid back = scfdma_demodulate(wave, pool);
    CHECK(rel_err(full.cells, back.cells) < 1e-9);
}

TEST_CASE("channel estimation: constant, ramp, equalisation") {
    ResourcePool pool = default_pool();
    std::mt19937_64 rng(34);
    LinkDims dims = link_dims(pool);
    BitVec tb = coding::random_bits(dims.tbs_bits, rng);
    ResourceGrid tx = build_tx_grid(SciMessage{}, tb, pool, 0);

    SUBCASE("flat channel is estimated exactly") {
        ResourceGrid rx = tx;
        for (auto& c : rx.cells) c *= cplx{2.0, 0.0};
        auto ref = generate_dmrs(dims.pscch_n_sc, 0, SlChannel::Pscch);
        auto est = estimate_channel(rx, ref, dims.pscch_sc0, dims.pscch_n_sc, pool.dmrs_symbols());
        for (int l = 0; l < est.n_sym; ++l)
            for (int k = 0; k < est.n_sc; ++k) CHECK(std::abs(est.at(k, l) - cplx{2.0, 0.0}) < 1e-9);
    }

    SUBCASE("linear phase ramp across subcarriers is recovered") {
        ResourceGrid rx = tx;
        const double beta = 0.01;
        for (int l = 0; l < rx.n_sym; ++l)
            for (int k = 0; k < rx.n_sc; ++k) rx.at(k, l) *= std::polar(1.0, beta * k);
        auto ref = generate_dmrs(dims.pssch_n_sc, 0, SlChannel::Pssch);
        auto est = estimate_channel(rx, ref, dims.pssch_sc0, dims.pssch_n_sc, pool.dmrs_symbols());
        for (int l = 0; l < est.n_sym; ++l)
            for (int k = 0; k < est.n_sc; ++k) {
                cplx expect = std::polar(1.0, beta * (dims.pssch_sc0 + k));
                CHECK(std::abs(est.at(k, l) - expect) < 1e-6);
            }
    }

    SUBCASE("pure rotation equalised exactly, near-zero estimate bounded") {
        ResourceGrid rx = tx;
        for (auto& c : rx.cells) c *= cplx{0.0, 1.0};
        auto ref = generate_dmrs(dims.pscch_n_sc, 0, SlChannel::Pscch);
        auto est = estimate_channel(rx, ref, dims.pscch_sc0, dims.pscch_n_sc, pool.dmrs_symbols());
        auto eq = equalize(rx, est);
        for (int l : pool.data_symbols())
            for (int k = 0; k < est.n_sc; ++k) {
                std::size_t i = static_cast<std::size_t>(l) * est.n_sc + static_cast<std::size_t>(k);
                CHECK(std::abs(eq.z[i] - tx.at(k, l)) < 1e-9);
            }

        est.at(5, 7) = {1e-14, 0.0};
        auto eq2 = equalize(rx, est);
        std::size_t i = 7u * static_cast<std::size_t>(est.n_sc) + 5u;
        CHECK(eq2.low_conf[i] == 1);
        CHECK(std::isfinite(eq2.z[i].real()));
    }

    SUBCASE("zero reference symbol raises degeneracy error") {
        std::vector<cplx> ref(static_cast<std::size_t>(dims.pscch_n_sc), cplx{1.0, 0.0});
        ref[3] = {0.0, 0.0};
        CHECK_THROWS_AS(estimate_channel(tx, ref, dims.pscch_sc0, dims.pscch_n_sc, pool.dmrs_symbols()),
                        std::domain_error);
    }
}

TEST_CASE("estimation MSE decreases with SNR") {
    ResourcePool pool = default_pool();
    std::mt19937_64 rng(35);
    LinkDims dims = link_dims(pool);
    BitVec tb = coding::random_bits(dims.tbs_bits, rng);
    ResourceGrid tx = build_tx_grid(SciMessage{}, tb, pool, 0);
    auto ref = generate_dmrs(dims.pscch_n_sc, 0, SlChannel::Pscch);

    std::normal_distribution<double> g(0.0, 1.0);
    double prev = 1e9;
    for (double snr_db : {0.0, 10.0, 20.0, 30.0}) {
        double var = db_to_lin(-snr_db);
        double mse = 0;
        int cnt = 0;
        for (int trial = 0; trial < 20; ++trial) {
            ResourceGrid rx = tx;
            for (auto& c : rx.cells) c += cplx{g(rng), g(rng)} * std::sqrt(var / 2.0);
            auto est = estimate_channel(rx, ref, dims.pscch_sc0, dims.pscch_n_sc, pool.dmrs_symbols());
            for (auto& h : est.h) {
                mse += std::norm(h - cplx{1.0, 0.0});
                ++cnt;
            }
        }
        mse /= cnt;
        CHECK(mse < prev);
        prev = mse;
    }
}

TEST_CASE("sci message packing round trip") {
    SciMessage m;
    m.mcs = 17;
    m.resource_indication = 201;
    m.time_resource_pattern = 99;
    m.group_destination_id = 254;
    m.frequency_hopping_flag = 1;
    m.retransmission_opportunity = 1;
    auto bits = m.pack();
    CHECK(bits.size() == 32u);
    CHECK(SciMessage::unpack(bits) == m);
}

TEST_CASE("full chain loopback over identity channel") {
    std::mt19937_64 rng(36);
    for (auto adjacency : {Adjacency::Adjacent, Adjacency::NonAdjacent}) {
        ResourcePool pool = default_pool();
        pool.adjacency = adjacency;
        if (adjacency == Adjacency::NonAdjacent) {
            pool.subchannel_size_prbs = 46;
            pool.pssch_start_prb = 2;
        }
        LinkDims dims = link_dims(pool);
        for (int shift : {0, 3, 6, 9}) {
            SciMessage sci;
            sci.resource_indication = static_cast<uint32_t>(rng() % 256);
            BitVec tb = coding::random_bits(dims.tbs_bits, rng);
            ResourceGrid tx = build_tx_grid(sci, tb, pool, shift);
            Waveform w = scfdma_modulate(tx, pool);
            ResourceGrid rx = scfdma_demodulate(w, pool);
            std::vector<const ResourceGrid*> ants = {&rx, &rx};

            auto det = blind_decode_pscch(ants, 1e-12, pool);
            REQUIRE(det.has_value());
            CHECK(det->cyclic_shift == shift);
            CHECK(det->sci == sci);

            auto data = decode_pssch(ants, 1e-12, *det, pool);
            CHECK(data.crc_ok);
            CHECK(data.payload == tb);
        }
    }
}

TEST_CASE("grid occupancy conservation: rx paths partition occupied cells") {
    ResourcePool pool = default_pool();
    LinkDims d = link_dims(pool);
    // Cells read by the receiver: PSCCH data+DMRS columns over its subcarriers
    // and likewise for PSSCH. Each occupied tx cell must be claimed once.
    std::mt19937_64 rng(37);
    BitVec tb = coding::random_bits(d.tbs_bits, rng);
    ResourceGrid tx = build_tx_grid(SciMessage{}, tb, pool, 0);

    std::set<std::pair<int, int>> claimed;
    auto claim = [&](int sc0, int n_sc) {
        for (int l = 0; l < pool.symbols_per_subframe; ++l) {
            if (pool.guard_symbol && l == pool.symbols_per_subframe - 1) continue;
            for (int k = sc0; k < sc0 + n_sc; ++k) {
                auto [it, fresh] = claimed.insert({k, l});
                CHECK(fresh);
            }
        }
    };
    claim(d.pscch_sc0, d.pscch_n_sc);
    claim(d.pssch_sc0, d.pssch_n_sc);

    std::size_t occupied = tx.occupied_count();
    CHECK(claimed.size() == occupied);
    for (auto [k, l] : claimed) CHECK(tx.tag(k, l) != CellTag::Empty);
}

TEST_CASE("pscch blind decode false alarms on pure noise are rare") {
    ResourcePool pool = default_pool();
    std::mt19937_64 rng(38);
    std::normal_distribution<double> g(0.0, 1.0);
    int false_alarms = 0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t) {
        ResourceGrid noise(pool.n_subcarriers(), pool.symbols_per_subframe);
        for (auto& c : noise.cells) c = {g(rng), g(rng)};
        std::vector<const ResourceGrid*> ants = {&noise, &noise};
        if (blind_decode_pscch(ants, 1.0, pool).has_value()) ++false_alarms;
    }
    // CRC16 false pass is ~4*2^-16 per subframe; 300 trials should see none
    // almost surely (p ~ 2%).
    CHECK(false_alarms <= 1);
}

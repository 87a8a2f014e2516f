#include "sidelink/phy/scfdma.hpp"

#include <stdexcept>

#include "sidelink/phy/dft.hpp"

namespace sidelink::phy {

namespace {

// CP lengths scale with the FFT size relative to the LTE 2048-sample scale
// ({160, 144x6} at 30.72 Msps -> {80, 72x6} at 15.36 Msps).
std::vector<int> cp_lengths(const ResourcePool& pool) {
    int base_first = 160 * pool.fft_size / 2048;
    int base_rest = 144 * pool.fft_size / 2048;
    std::vector<int> cp(static_cast<std::size_t>(pool.symbols_per_subframe));
    for (int l = 0; l < pool.symbols_per_subframe; ++l)
        cp[static_cast<std::size_t>(l)] = (l % 7 == 0) ? base_first : base_rest;
    return cp;
}

}  // namespace

std::size_t scfdma_samples_per_subframe(const ResourcePool& pool) {
    std::size_t n = 0;
    for (int c : cp_lengths(pool)) n += static_cast<std::size_t>(c + pool.fft_size);
    return n;
}

Waveform scfdma_modulate(const ResourceGrid& grid, const ResourcePool& pool) {
    if (grid.n_sc != pool.n_subcarriers() || grid.n_sym != pool.symbols_per_subframe)
        throw std::invalid_argument("scfdma_modulate: grid does not match pool");
    if (pool.n_subcarriers() > pool.fft_size) throw std::invalid_argument("scfdma_modulate: FFT too small");

    auto cps = cp_lengths(pool);
    Waveform wave;
    wave.sample_rate_hz = pool.sample_rate_hz;
    wave.samples.reserve(scfdma_samples_per_subframe(pool));

    const int n = pool.fft_size;
    const int half = grid.n_sc / 2;
    std::vector<cplx> freq(static_cast<std::size_t>(n));
    for (int l = 0; l < grid.n_sym; ++l) {
        std::fill(freq.begin(), freq.end(), cplx{0.0, 0.0});
        for (int k = 0; k < grid.n_sc; ++k) {
            int bin = (k - half + n) % n;
            freq[static_cast<std::size_t>(bin)] = grid.at(k, l);
        }
        auto time = dft_inverse(freq);
        int cp = cps[static_cast<std::size_t>(l)];
        wave.samples.insert(wave.samples.end(), time.end() - cp, time.end());
        wave.samples.insert(wave.samples.end(), time.begin(), time.end());
    }
    return wave;
}

ResourceGrid scfdma_demodulate(const Waveform& wave, const ResourcePool& pool) {
    if (wave.samples.size() != scfdma_samples_per_subframe(pool))
        throw std::invalid_argument("scfdma_demodulate: unexpected sample count");
    auto cps = cp_lengths(pool);
    ResourceGrid grid(pool.n_subcarriers(), pool.symbols_per_subframe);
    const int n = pool.fft_size;
    const int half = grid.n_sc / 2;

    std::size_t pos = 0;
    std::vector<cplx> time(static_cast<std::size_t>(n));
    for (int l = 0; l < grid.n_sym; ++l) {
        pos += static_cast<std::size_t>(cps[static_cast<std::size_t>(l)]);
        std::copy(wave.samples.begin() + static_cast<long>(pos),
                  wave.samples.begin() + static_cast<long>(pos) + n, time.begin());
        pos += static_cast<std::size_t>(n);
        auto freq = dft_forward(time);
        for (int k = 0; k < grid.n_sc; ++k) {
            int bin = (k - half + n) % n;
            grid.at(k, l) = freq[static_cast<std::size_t>(bin)];
        }
    }
    return grid;
}

}  // namespace sidelink::phy

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "sidelink/common.hpp"
#include "sidelink/phy/grid.hpp"

namespace sidelink::channel {

// Tapped-delay-line power-delay profile. Defaults to Extended Vehicular A.
struct TdlProfile {
    std::vector<double> tap_delays_ns;
    std::vector<double> tap_powers_db;

    static TdlProfile eva() {
        return {{0, 30, 150, 310, 370, 710, 1090, 1730, 2510},
                {0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9}};
    }

    int n_taps() const { return static_cast<int>(tap_delays_ns.size()); }

    // Linear powers normalised to unit sum.
    std::vector<double> linear_powers() const;
};

double doppler_frequency_hz(double velocity_kmh, double carrier_hz);

// Time-varying TDL fading for a 1x2 receiver. Each (antenna, tap) runs an
// independent sum-of-sinusoids process with the classical Jakes spectrum:
// stratified arrival angles with a random rotation plus i.i.d. phases, 32
// sinusoids. Gains advance per sample above 1 kHz Doppler, per 16 samples
// below.
class FadingRealization {
  public:
    static constexpr int kAntennas = 2;
    static constexpr int kSinusoids = 32;

    FadingRealization(const TdlProfile& profile, double velocity_kmh, double carrier_hz,
                      double sample_rate_hz, uint64_t seed);

    double doppler_hz() const { return doppler_hz_; }
    double velocity_kmh() const { return velocity_kmh_; }
    int n_taps() const { return n_taps_; }

    // Complex gain of one tap at an absolute sample index, evaluated directly
    // from the sinusoid model.
    cplx tap_gain(int antenna, int tap, uint64_t sample_index) const;

    int update_granularity() const { return doppler_hz_ > 1000.0 ? 1 : 16; }

    const std::vector<int>& tap_delays_samples() const { return delay_samples_; }

    // Filters the waveform through the time-varying channel; returns one
    // faded waveform per receive antenna.
    std::array<phy::Waveform, kAntennas> apply(const phy::Waveform& wave) const;

  private:
    int n_taps_;
    double velocity_kmh_;
    double doppler_hz_;
    double sample_rate_hz_;
    std::vector<double> amp_;  // per-tap sinusoid amplitude
    std::vector<int> delay_samples_;
    // omega[ant][tap][m] (rad/sample), phi likewise.
    std::vector<double> omega_, phi_;

    std::size_t idx(int a, int t, int m) const {
        return (static_cast<std::size_t>(a) * static_cast<std::size_t>(n_taps_) + static_cast<std::size_t>(t)) *
                   kSinusoids +
               static_cast<std::size_t>(m);
    }
};

// Adds circularly-symmetric white Gaussian noise at the given SNR relative to
// signal_power_ref. SNRs at or above 300 dB add nothing.
phy::Waveform add_awgn(const phy::Waveform& wave, double snr_db, double signal_power_ref,
                       std::mt19937_64& rng);

}  // namespace sidelink::channel

#include "sidelink/channel/fading.hpp"

#include <cmath>
#include <stdexcept>

namespace sidelink::channel {

std::vector<double> TdlProfile::linear_powers() const {
    std::vector<double> p(tap_powers_db.size());
    double sum = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = db_to_lin(tap_powers_db[i]);
        sum += p[i];
    }
    for (auto& v : p) v /= sum;
    return p;
}

double doppler_frequency_hz(double velocity_kmh, double carrier_hz) {
    if (velocity_kmh < 0) throw std::invalid_argument("doppler_frequency_hz: negative velocity");
    return velocity_kmh / 3.6 * carrier_hz / kSpeedOfLight;
}

FadingRealization::FadingRealization(const TdlProfile& profile, double velocity_kmh, double carrier_hz,
                                     double sample_rate_hz, uint64_t seed)
    : n_taps_(profile.n_taps()),
      velocity_kmh_(velocity_kmh),
      doppler_hz_(doppler_frequency_hz(velocity_kmh, carrier_hz)),
      sample_rate_hz_(sample_rate_hz) {
    if (profile.tap_delays_ns.size() != profile.tap_powers_db.size() || n_taps_ == 0)
        throw std::invalid_argument("FadingRealization: malformed profile");

    auto powers = profile.linear_powers();
    amp_.resize(static_cast<std::size_t>(n_taps_));
    delay_samples_.resize(static_cast<std::size_t>(n_taps_));
    for (int t = 0; t < n_taps_; ++t) {
        amp_[static_cast<std::size_t>(t)] = std::sqrt(powers[static_cast<std::size_t>(t)] / kSinusoids);
        delay_samples_[static_cast<std::size_t>(t)] =
            static_cast<int>(std::lround(profile.tap_delays_ns[static_cast<std::size_t>(t)] * 1e-9 * sample_rate_hz));
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    omega_.resize(static_cast<std::size_t>(kAntennas) * static_cast<std::size_t>(n_taps_) * kSinusoids);
    phi_.resize(omega_.size());
    const double w_max = 2.0 * kPi * doppler_hz_ / sample_rate_hz;
    for (int a = 0; a < kAntennas; ++a) {
        for (int t = 0; t < n_taps_; ++t) {
            double rot = uni(rng);  // common stratification offset per process
            for (int m = 0; m < kSinusoids; ++m) {
                double alpha = 2.0 * kPi * (m + rot) / kSinusoids;
                omega_[idx(a, t, m)] = w_max * std::cos(alpha);
                phi_[idx(a, t, m)] = 2.0 * kPi * uni(rng);
            }
        }
    }
}

cplx FadingRealization::tap_gain(int antenna, int tap, uint64_t sample_index) const {
    double re = 0, im = 0;
    double n = static_cast<double>(sample_index);
    for (int m = 0; m < kSinusoids; ++m) {
        double ph = omega_[idx(antenna, tap, m)] * n + phi_[idx(antenna, tap, m)];
        re += std::cos(ph);
        im += std::sin(ph);
    }
    double a = amp_[static_cast<std::size_t>(tap)];
    return {a * re, a * im};
}

std::array<phy::Waveform, FadingRealization::kAntennas> FadingRealization::apply(const phy::Waveform& wave) const {
    const std::size_t n = wave.samples.size();
    const int gran = update_granularity();
    const std::size_t n_updates = (n + static_cast<std::size_t>(gran) - 1) / static_cast<std::size_t>(gran);

    std::array<phy::Waveform, kAntennas> out;
    for (auto& w : out) {
        w.sample_rate_hz = wave.sample_rate_hz;
        w.samples.assign(n, cplx{0.0, 0.0});
    }

    // Phasor recurrence per sinusoid at the update cadence; gains held
    // constant within a granule.
    std::vector<cplx> z(static_cast<std::size_t>(kSinusoids));
    std::vector<cplx> step(static_cast<std::size_t>(kSinusoids));
    std::vector<cplx> gains(n_updates);
    for (int a = 0; a < kAntennas; ++a) {
        for (int t = 0; t < n_taps_; ++t) {
            for (int m = 0; m < kSinusoids; ++m) {
                z[static_cast<std::size_t>(m)] = std::polar(1.0, phi_[idx(a, t, m)]);
                step[static_cast<std::size_t>(m)] = std::polar(1.0, omega_[idx(a, t, m)] * gran);
            }
            double amp = amp_[static_cast<std::size_t>(t)];
            for (std::size_t u = 0; u < n_updates; ++u) {
                cplx acc{0.0, 0.0};
                for (int m = 0; m < kSinusoids; ++m) {
                    acc += z[static_cast<std::size_t>(m)];
                    z[static_cast<std::size_t>(m)] *= step[static_cast<std::size_t>(m)];
                }
                gains[u] = amp * acc;
            }
            const int d = delay_samples_[static_cast<std::size_t>(t)];
            auto& y = out[static_cast<std::size_t>(a)].samples;
            for (std::size_t i = static_cast<std::size_t>(d); i < n; ++i) {
                y[i] += gains[i / static_cast<std::size_t>(gran)] * wave.samples[i - static_cast<std::size_t>(d)];
            }
        }
    }
    return out;
}

phy::Waveform add_awgn(const phy::Waveform& wave, double snr_db, double signal_power_ref,
                       std::mt19937_64& rng) {
    if (signal_power_ref <= 0) throw std::invalid_argument("add_awgn: non-positive reference power");
    phy::Waveform out = wave;
    if (snr_db >= 300.0) return out;
    double var = signal_power_ref * db_to_lin(-snr_db);
    double sigma_dim = std::sqrt(var / 2.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& s : out.samples) {
        s += cplx{sigma_dim * gauss(rng), sigma_dim * gauss(rng)};
    }
    return out;
}

}  // namespace sidelink::channel

#include "sidelink/phy/dump.hpp"

#include <fstream>
#include <stdexcept>

namespace sidelink::phy {

namespace {

void write_cf64(const std::string& path, const std::vector<cplx>& data) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("dump: cannot open " + path);
    for (const auto& c : data) {
        float re = static_cast<float>(c.real());
        float im = static_cast<float>(c.imag());
        f.write(reinterpret_cast<const char*>(&re), sizeof re);
        f.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
}

}  // namespace

void dump_grid(const ResourceGrid& grid, const std::string& prefix, uint64_t seed) {
    write_cf64(prefix + ".cf64", grid.cells);
    std::ofstream f(prefix + ".json");
    if (!f) throw std::runtime_error("dump: cannot open " + prefix + ".json");
    f << "{\n  \"kind\": \"resource_grid\",\n  \"n_subcarriers\": " << grid.n_sc
      << ",\n  \"n_symbols\": " << grid.n_sym << ",\n  \"layout\": \"column_major_symbols\""
      << ",\n  \"sample_format\": \"complex64_le\",\n  \"seed\": " << seed << ",\n  \"occupancy\": [";
    for (int l = 0; l < grid.n_sym; ++l) {
        f << (l ? ",\n    \"" : "\n    \"");
        for (int k = 0; k < grid.n_sc; ++k) {
            static const char tag_chars[] = {'.', 'c', 'd', 'r'};  // empty/pscch/pssch/dmrs
            f << tag_chars[static_cast<int>(grid.tag(k, l))];
        }
        f << '"';
    }
    f << "\n  ]\n}\n";
}

void dump_waveform(const Waveform& wave, const std::string& prefix, uint64_t seed) {
    write_cf64(prefix + ".cf64", wave.samples);
    std::ofstream f(prefix + ".json");
    if (!f) throw std::runtime_error("dump: cannot open " + prefix + ".json");
    f << "{\n  \"kind\": \"waveform\",\n  \"n_samples\": " << wave.samples.size()
      << ",\n  \"sample_rate_hz\": " << wave.sample_rate_hz
      << ",\n  \"sample_format\": \"complex64_le\",\n  \"seed\": " << seed << "\n}\n";
}

}  // namespace sidelink::phy

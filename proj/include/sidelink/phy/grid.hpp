#pragma once

#include <vector>

#include "sidelink/common.hpp"
#include "sidelink/phy/pool.hpp"

namespace sidelink::phy {

enum class CellTag : uint8_t { Empty = 0, Pscch, Pssch, Dmrs };

// Complex symbol matrix, subcarriers x SC-FDMA symbols, column-major in time.
struct ResourceGrid {
    int n_sc = 0;
    int n_sym = 0;
    std::vector<cplx> cells;
    std::vector<CellTag> tags;

    ResourceGrid() = default;
    ResourceGrid(int sc, int sym)
        : n_sc(sc), n_sym(sym), cells(static_cast<std::size_t>(sc) * sym), tags(cells.size(), CellTag::Empty) {}

    cplx& at(int k, int l) { return cells[static_cast<std::size_t>(l) * n_sc + k]; }
    const cplx& at(int k, int l) const { return cells[static_cast<std::size_t>(l) * n_sc + k]; }
    CellTag& tag(int k, int l) { return tags[static_cast<std::size_t>(l) * n_sc + k]; }
    CellTag tag(int k, int l) const { return tags[static_cast<std::size_t>(l) * n_sc + k]; }

    std::size_t occupied_count() const {
        std::size_t n = 0;
        for (auto t : tags) n += t != CellTag::Empty;
        return n;
    }

    double occupied_power() const {
        double p = 0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (tags[i] != CellTag::Empty) {
                p += std::norm(cells[i]);
                ++n;
            }
        }
        return n ? p / static_cast<double>(n) : 0.0;
    }
};

struct Waveform {
    std::vector<cplx> samples;
    double sample_rate_hz = 0.0;

    double mean_power() const {
        double p = 0;
        for (const auto& s : samples) p += std::norm(s);
        return samples.empty() ? 0.0 : p / static_cast<double>(samples.size());
    }
};

}  // namespace sidelink::phy

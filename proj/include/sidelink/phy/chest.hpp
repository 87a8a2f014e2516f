#pragma once

#include <vector>

#include "sidelink/common.hpp"
#include "sidelink/phy/grid.hpp"

namespace sidelink::phy {

// Natural cubic spline through (xs, ys), evaluated at x with end-segment
// extrapolation. xs strictly increasing, at least two points.
std::vector<cplx> cubic_interp(const std::vector<double>& xs, const std::vector<cplx>& ys,
                               const std::vector<double>& x_eval);

struct ChannelEstimate {
    int sc0 = 0;                 // first estimated subcarrier
    int n_sc = 0;                // allocation width
    int n_sym = 0;
    std::vector<cplx> h;         // column-major like ResourceGrid, allocation only

    cplx& at(int k, int l) { return h[static_cast<std::size_t>(l) * n_sc + k]; }
    const cplx& at(int k, int l) const { return h[static_cast<std::size_t>(l) * n_sc + k]; }
};

// Least-squares estimates at the DMRS cells of [sc0, sc0+n_sc), cubic
// interpolation across the 14 symbols per subcarrier. `freq_window` (odd,
// >=1) applies a moving-average smoothing over pilot subcarriers before
// interpolation; 1 disables it. Throws on a vanishing reference symbol.
ChannelEstimate estimate_channel(const ResourceGrid& rx, const std::vector<cplx>& dmrs_ref, int sc0,
                                 int n_sc, const std::vector<int>& dmrs_syms, int freq_window = 1);

// Zero-forcing equalisation of one allocation; cells whose estimate magnitude
// falls below `eps` are regularised and flagged low-confidence.
struct Equalized {
    std::vector<cplx> z;            // column-major, n_sc x n_sym
    std::vector<uint8_t> low_conf;  // 1 where |h| < eps
};

Equalized equalize(const ResourceGrid& rx, const ChannelEstimate& est, double eps = 1e-12);

}  // namespace sidelink::phy

#pragma once

#include <array>
#include <vector>

#include "sidelink/phy/chest.hpp"
#include "sidelink/phy/grid.hpp"

namespace sidelink::channel {

struct MrcResult {
    std::vector<cplx> z;            // combined symbols, column-major over the allocation
    std::vector<double> noise_var;  // post-combining noise variance per cell
};

// Maximal-ratio combining across receive antennas:
// z = sum(conj(h_a) y_a) / sum(|h_a|^2), noise = sigma^2 / sum(|h_a|^2).
// Estimates must share the allocation geometry. Cells where the combined
// channel power falls below eps^2 are regularised.
MrcResult mrc_combine(const std::vector<const phy::ResourceGrid*>& rx,
                      const std::vector<const phy::ChannelEstimate*>& est, double noise_var_per_antenna,
                      double eps = 1e-12);

}  // namespace sidelink::channel

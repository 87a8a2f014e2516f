#include "sidelink/channel/mrc.hpp"

#include <stdexcept>

namespace sidelink::channel {

MrcResult mrc_combine(const std::vector<const phy::ResourceGrid*>& rx,
                      const std::vector<const phy::ChannelEstimate*>& est, double noise_var_per_antenna,
                      double eps) {
    if (rx.empty() || rx.size() != est.size()) throw std::invalid_argument("mrc_combine: branch count mismatch");
    const phy::ChannelEstimate& ref = *est[0];
    for (const auto* e : est)
        if (e->n_sc != ref.n_sc || e->n_sym != ref.n_sym || e->sc0 != ref.sc0)
            throw std::invalid_argument("mrc_combine: estimate geometry mismatch");

    MrcResult out;
    out.z.resize(ref.h.size());
    out.noise_var.resize(ref.h.size());
    for (int l = 0; l < ref.n_sym; ++l) {
        for (int k = 0; k < ref.n_sc; ++k) {
            std::size_t i = static_cast<std::size_t>(l) * ref.n_sc + static_cast<std::size_t>(k);
            cplx num{0.0, 0.0};
            double den = 0.0;
            for (std::size_t a = 0; a < rx.size(); ++a) {
                cplx h = est[a]->h[i];
                num += std::conj(h) * rx[a]->at(ref.sc0 + k, l);
                den += std::norm(h);
            }
            if (den < eps * eps) den = eps * eps;
            out.z[i] = num / den;
            out.noise_var[i] = noise_var_per_antenna / den;
        }
    }
    return out;
}

}  // namespace sidelink::channel

#include "sidelink/phy/qpsk.hpp"

#include <stdexcept>

namespace sidelink::phy {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

std::vector<cplx> qpsk_map(const coding::BitVec& bits) {
    if (bits.size() % 2 != 0) throw std::invalid_argument("qpsk_map: odd bit count");
    std::vector<cplx> out(bits.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double re = bits[2 * i] ? -kInvSqrt2 : kInvSqrt2;
        double im = bits[2 * i + 1] ? -kInvSqrt2 : kInvSqrt2;
        out[i] = {re, im};
    }
    return out;
}

coding::SoftVec qpsk_soft_demap(const std::vector<cplx>& symbols, const std::vector<double>& noise_var) {
    if (symbols.size() != noise_var.size()) throw std::invalid_argument("qpsk_soft_demap: size mismatch");
    coding::SoftVec llrs(2 * symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        double nv = noise_var[i];
        if (nv <= 0.0) throw std::invalid_argument("qpsk_soft_demap: noise variance must be positive");
        double scale = 2.0 * std::sqrt(2.0) / nv;
        llrs[2 * i] = static_cast<float>(scale * symbols[i].real());
        llrs[2 * i + 1] = static_cast<float>(scale * symbols[i].imag());
    }
    return llrs;
}

coding::SoftVec qpsk_soft_demap(const std::vector<cplx>& symbols, double noise_var) {
    return qpsk_soft_demap(symbols, std::vector<double>(symbols.size(), noise_var));
}

}  // namespace sidelink::phy

#include "sidelink/phy/dmrs.hpp"

#include <stdexcept>

namespace sidelink::phy {

namespace {

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

int largest_prime_below(int n) {
    for (int p = n - 1; p >= 2; --p)
        if (is_prime(p)) return p;
    throw std::invalid_argument("dmrs: sequence too short");
}

}  // namespace

std::vector<cplx> generate_dmrs(int length, int cyclic_shift, SlChannel channel) {
    if (cyclic_shift != 0 && cyclic_shift != 3 && cyclic_shift != 6 && cyclic_shift != 9)
        throw std::invalid_argument("generate_dmrs: cyclic shift must be one of {0,3,6,9}");
    if (length < 12) throw std::invalid_argument("generate_dmrs: length below one PRB");
    const int nzc = largest_prime_below(length);
    const int root = channel == SlChannel::Pscch ? 1 : 2;
    std::vector<cplx> out(static_cast<std::size_t>(length));
    const double alpha = 2.0 * kPi * static_cast<double>(cyclic_shift) / 12.0;
    for (int n = 0; n < length; ++n) {
        int m = n % nzc;
        double phase = -kPi * root * static_cast<double>(m) * (m + 1) / nzc + alpha * n;
        out[static_cast<std::size_t>(n)] = std::polar(1.0, phase);
    }
    return out;
}

}  // namespace sidelink::phy

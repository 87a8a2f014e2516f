#include "sidelink/phy/dft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace sidelink::phy {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::size_t, PlanPair>& plan_cache() {
    static std::map<std::size_t, PlanPair> cache;
    return cache;
}

// FFTW_UNALIGNED lets one plan serve any caller-provided buffers;
// fftw_execute_dft on a shared plan is re-entrant.
PlanPair plans_for(std::size_t n) {
    std::lock_guard<std::mutex> lk(g_plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cplx> a(n), b(n);
    PlanPair p;
    p.fwd = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.inv = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()), FFTW_BACKWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache[n] = p;
    return p;
}

std::vector<cplx> run(const std::vector<cplx>& in, bool forward) {
    if (in.empty()) throw std::invalid_argument("dft: empty input");
    std::vector<cplx> src = in, dst(in.size());
    PlanPair p = plans_for(in.size());
    fftw_execute_dft(forward ? p.fwd : p.inv, reinterpret_cast<fftw_complex*>(src.data()),
                     reinterpret_cast<fftw_complex*>(dst.data()));
    double scale = 1.0 / std::sqrt(static_cast<double>(in.size()));
    for (auto& v : dst) v *= scale;
    return dst;
}

}  // namespace

std::vector<cplx> dft_forward(const std::vector<cplx>& in) { return run(in, true); }
std::vector<cplx> dft_inverse(const std::vector<cplx>& in) { return run(in, false); }

std::vector<cplx> transform_precode(const std::vector<cplx>& symbols, int m_subcarriers) {
    if (m_subcarriers <= 0 || symbols.size() % static_cast<std::size_t>(m_subcarriers) != 0)
        throw std::invalid_argument("transform_precode: input not divisible into blocks");
    std::vector<cplx> out;
    out.reserve(symbols.size());
    std::vector<cplx> block(static_cast<std::size_t>(m_subcarriers));
    for (std::size_t o = 0; o < symbols.size(); o += static_cast<std::size_t>(m_subcarriers)) {
        std::copy(symbols.begin() + static_cast<long>(o),
                  symbols.begin() + static_cast<long>(o) + m_subcarriers, block.begin());
        auto spread = dft_forward(block);
        out.insert(out.end(), spread.begin(), spread.end());
    }
    return out;
}

std::vector<cplx> transform_deprecode(const std::vector<cplx>& symbols, int m_subcarriers) {
    if (m_subcarriers <= 0 || symbols.size() % static_cast<std::size_t>(m_subcarriers) != 0)
        throw std::invalid_argument("transform_deprecode: input not divisible into blocks");
    std::vector<cplx> out;
    out.reserve(symbols.size());
    std::vector<cplx> block(static_cast<std::size_t>(m_subcarriers));
    for (std::size_t o = 0; o < symbols.size(); o += static_cast<std::size_t>(m_subcarriers)) {
        std::copy(symbols.begin() + static_cast<long>(o),
                  symbols.begin() + static_cast<long>(o) + m_subcarriers, block.begin());
        auto despread = dft_inverse(block);
        out.insert(out.end(), despread.begin(), despread.end());
    }
    return out;
}

}  // namespace sidelink::phy

#include "sidelink/phy/chest.hpp"

#include <stdexcept>

namespace sidelink::phy {

std::vector<cplx> cubic_interp(const std::vector<double>& xs, const std::vector<cplx>& ys,
                               const std::vector<double>& x_eval) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) throw std::invalid_argument("cubic_interp: need >= 2 knots");

    // Second derivatives of the natural spline (complex, solved per part via
    // the standard tridiagonal recurrence).
    std::vector<cplx> m(n, cplx{0.0, 0.0});
    if (n > 2) {
        std::vector<double> h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = xs[i + 1] - xs[i];
        std::vector<double> diag(n - 2), upper(n - 2);
        std::vector<cplx> rhs(n - 2);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            diag[i - 1] = 2.0 * (h[i - 1] + h[i]);
            upper[i - 1] = h[i];
            rhs[i - 1] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
        }
        for (std::size_t i = 1; i < rhs.size(); ++i) {
            double w = h[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for (std::size_t i = rhs.size(); i-- > 0;) {
            cplx t = rhs[i];
            if (i + 1 < rhs.size()) t -= upper[i] * m[i + 2];
            m[i + 1] = t / diag[i];
        }
    }

    std::vector<cplx> out(x_eval.size());
    for (std::size_t e = 0; e < x_eval.size(); ++e) {
        double x = x_eval[e];
        std::size_t seg = 0;
        while (seg + 2 < n && x > xs[seg + 1]) ++seg;
        double h = xs[seg + 1] - xs[seg];
        double a = (xs[seg + 1] - x) / h;
        double b = (x - xs[seg]) / h;
        out[e] = a * ys[seg] + b * ys[seg + 1] +
                 ((a * a * a - a) * m[seg] + (b * b * b - b) * m[seg + 1]) * (h * h) / 6.0;
    }
    return out;
}

ChannelEstimate estimate_channel(const ResourceGrid& rx, const std::vector<cplx>& dmrs_ref, int sc0,
                                 int n_sc, const std::vector<int>& dmrs_syms, int freq_window) {
    if (dmrs_ref.size() != static_cast<std::size_t>(n_sc))
        throw std::invalid_argument("estimate_channel: reference length mismatch");
    if (freq_window < 1 || freq_window % 2 == 0)
        throw std::invalid_argument("estimate_channel: freq_window must be odd and >= 1");

    const std::size_t np = dmrs_syms.size();
    // LS at pilots: H = Y / X.
    std::vector<std::vector<cplx>> ls(np, std::vector<cplx>(static_cast<std::size_t>(n_sc)));
    for (std::size_t p = 0; p < np; ++p) {
        for (int k = 0; k < n_sc; ++k) {
            cplx ref = dmrs_ref[static_cast<std::size_t>(k)];
            if (std::abs(ref) < 1e-30) throw std::domain_error("estimate_channel: zero reference symbol");
            ls[p][static_cast<std::size_t>(k)] = rx.at(sc0 + k, dmrs_syms[p]) / ref;
        }
    }

    if (freq_window > 1) {
        int half = freq_window / 2;
        for (std::size_t p = 0; p < np; ++p) {
            std::vector<cplx> sm(static_cast<std::size_t>(n_sc));
            for (int k = 0; k < n_sc; ++k) {
                cplx acc{0.0, 0.0};
                int cnt = 0;
                for (int d = -half; d <= half; ++d) {
                    int kk = k + d;
                    if (kk < 0 || kk >= n_sc) continue;
                    acc += ls[p][static_cast<std::size_t>(kk)];
                    ++cnt;
                }
                sm[static_cast<std::size_t>(k)] = acc / static_cast<double>(cnt);
            }
            ls[p] = std::move(sm);
        }
    }

    ChannelEstimate est;
    est.sc0 = sc0;
    est.n_sc = n_sc;
    est.n_sym = rx.n_sym;
    est.h.resize(static_cast<std::size_t>(n_sc) * rx.n_sym);

    std::vector<double> xs(np), x_eval(static_cast<std::size_t>(rx.n_sym));
    for (std::size_t p = 0; p < np; ++p) xs[p] = static_cast<double>(dmrs_syms[p]);
    for (int l = 0; l < rx.n_sym; ++l) x_eval[static_cast<std::size_t>(l)] = static_cast<double>(l);
    std::vector<cplx> ys(np);
    for (int k = 0; k < n_sc; ++k) {
        for (std::size_t p = 0; p < np; ++p) ys[p] = ls[p][static_cast<std::size_t>(k)];
        auto col = cubic_interp(xs, ys, x_eval);
        for (int l = 0; l < rx.n_sym; ++l) est.at(k, l) = col[static_cast<std::size_t>(l)];
    }
    return est;
}

Equalized equalize(const ResourceGrid& rx, const ChannelEstimate& est, double eps) {
    Equalized out;
    out.z.resize(est.h.size());
    out.low_conf.assign(est.h.size(), 0);
    for (int l = 0; l < est.n_sym; ++l) {
        for (int k = 0; k < est.n_sc; ++k) {
            std::size_t idx = static_cast<std::size_t>(l) * est.n_sc + static_cast<std::size_t>(k);
            cplx h = est.h[idx];
            double mag2 = std::norm(h);
            if (mag2 < eps * eps) {
                out.low_conf[idx] = 1;
                mag2 = eps * eps;
            }
            out.z[idx] = rx.at(est.sc0 + k, l) * std::conj(h) / mag2;
        }
    }
    return out;
}

}  // namespace sidelink::phy

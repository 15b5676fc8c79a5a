#include "qslab/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "fourier.hpp"
#include "qslab/error.hpp"
#include "qslab/grid.hpp"
#include "qslab/parallel.hpp"
#include "qslab/scan.hpp"
#include "qslab/spacetime.hpp"

namespace qslab {

namespace {

constexpr int kGaussPoints = 20;
using Gauss = boost::math::quadrature::gauss<double, kGaussPoints>;

// Gauss-Legendre rule mapped to [a, b], appended to the output.
void append_panel(double a, double b, std::vector<double>& x, std::vector<double>& w) {
    const auto& ab = Gauss::abscissa();
    const auto& wt = Gauss::weights();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (std::size_t i = 0; i < ab.size(); ++i) {
        if (ab[i] == 0.0) {
            x.push_back(c);
            w.push_back(h * wt[i]);
            continue;
        }
        x.push_back(c - h * ab[i]);
        w.push_back(h * wt[i]);
        x.push_back(c + h * ab[i]);
        w.push_back(h * wt[i]);
    }
}

int pow2_at_least(double n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

double modulation_weight_sum(const std::vector<double>& sigma, const std::vector<double>& a2, double dsigma,
                             const lp::CutoffProfile& p) {
    double top = 0.0;
    for (double s : sigma) top = std::max(top, std::abs(s));
    const int j_top = top <= 1.0 ? 0 : static_cast<int>(std::ceil(std::log2(top))) + 1;
    std::vector<double> e(j_top + 1, 0.0);
    for (std::size_t m = 0; m < sigma.size(); ++m) {
        if (a2[m] == 0.0) continue;
        for (int j = 0; j <= j_top; ++j) {
            const double v = lp::eta(sigma[m], j, p);
            if (v != 0.0) e[j] += v * v * a2[m];
        }
    }
    double total = 0.0;
    for (int j = 0; j <= j_top; ++j) total += std::pow(2.0, 0.5 * j) * std::sqrt(e[j] * dsigma);
    return total;
}

}  // namespace

double psi_modulation_constant(const PacketOptions& o) {
    const int nt = 4096;
    const double dt = o.tlen / nt;
    std::vector<cplx> a(nt);
    for (int m = 0; m < nt; ++m) a[m] = lp::psi((m - nt / 2) * dt, o.profile);
    fourier::centered_axis(a.data(), nt, 1, 1, nt, dt, fourier::Direction::forward);
    const double ds = 2.0 * std::numbers::pi / o.tlen;
    std::vector<double> sigma(nt), a2(nt);
    for (int m = 0; m < nt; ++m) {
        sigma[m] = (m - nt / 2) * ds;
        a2[m] = std::norm(a[m]);
    }
    return modulation_weight_sum(sigma, a2, ds, o.profile);
}

double packet_fbar_norm(double N, double s, const PacketOptions& o) {
    std::vector<double> x, w;
    const double half = 12.0;
    const int panels = 24;
    for (int q = 0; q < panels; ++q)
        append_panel(N - half + 2.0 * half * q / panels, N - half + 2.0 * half * (q + 1) / panels, x, w);
    const double top = std::abs(N) + half;
    const int k_top = static_cast<int>(std::ceil(std::log2(std::max(top, 2.0)))) + 2;
    const double cpsi = psi_modulation_constant(o);
    double low = 0.0, sq = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double e = lp::eta0(x[n], o.profile);
        low += w[n] * e * e * std::exp(-(x[n] - N) * (x[n] - N));
    }
    sq += low;
    for (int k = 1; k <= k_top; ++k) {
        double e2 = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n) {
            const double e = lp::eta(x[n], k, o.profile);
            if (e != 0.0) e2 += w[n] * e * e * std::exp(-(x[n] - N) * (x[n] - N));
        }
        const double v = std::pow(2.0, s * k) * std::sqrt(e2) * cpsi;
        sq += v * v;
    }
    return std::sqrt(sq);
}

PacketSlice packet_slice(double N, double amplitude, double xi, const PacketOptions& o, PacketCut cut) {
    const double omega = xi * xi - 2.0 * N * xi;
    const double rate = std::abs(omega) + o.rate_margin;
    PacketSlice out;
    out.xi = xi;
    out.nt = std::max(o.coarse_nt, pow2_at_least(o.tlen * rate / std::numbers::pi));
    const int nt = out.nt;
    const double dt = o.tlen / nt;
    const double pref = amplitude * amplitude * std::numbers::sqrt2 * 0.5 * std::exp(-0.25 * xi * xi);

    std::vector<double> ps(nt), factor(nt);
    for (int m = 0; m < nt; ++m) ps[m] = lp::psi((m - nt / 2) * dt, o.profile);
    if (cut.piece == PacketPiece::whole) {
        for (int m = 0; m < nt; ++m) factor[m] = ps[m] * ps[m];
    } else {
        std::vector<cplx> c(ps.begin(), ps.end());
        fourier::dft(c.data(), nt, 1, 1, nt, -1);
        for (int l = 0; l < nt; ++l) {
            const int lp = l < nt / 2 ? l : l - nt;
            const double sg = 2.0 * std::numbers::pi * lp / o.tlen;
            c[l] = std::abs(sg) < cut.radius ? c[l] / static_cast<double>(nt) : cplx(0.0);
        }
        fourier::dft(c.data(), nt, 1, 1, nt, +1);
        for (int m = 0; m < nt; ++m) {
            const double pr = c[m].real();
            factor[m] = cut.piece == PacketPiece::inner ? pr * pr : ps[m] * ps[m] - pr * pr;
        }
    }

    std::vector<cplx> row(nt);
    for (int m = 0; m < nt; ++m) {
        const double t = (m - nt / 2) * dt;
        const double w = ps[m] * ps[m] * factor[m];
        row[m] = w == 0.0 ? cplx(0.0) : pref * w * std::exp(-t * t * xi * xi) * std::polar(1.0, t * omega);
    }
    cumulative_integral(row, dt, nt / 2, TimeQuadrature::spectral);
    for (int m = 0; m < nt; ++m) row[m] *= lp::psi(0.25 * (m - nt / 2) * dt, o.profile);

    const int stride = nt / o.coarse_nt;
    out.coarse_abs2.resize(o.coarse_nt);
    for (int c = 0; c < o.coarse_nt; ++c) out.coarse_abs2[c] = std::norm(row[static_cast<std::size_t>(c) * stride]);

    fourier::centered_axis(row.data(), nt, 1, 1, nt, dt, fourier::Direction::forward);
    out.dsigma = 2.0 * std::numbers::pi / o.tlen;
    out.sigma.resize(nt);
    out.spectrum_abs2.resize(nt);
    for (int m = 0; m < nt; ++m) {
        out.sigma[m] = (m - nt / 2) * out.dsigma;
        out.spectrum_abs2[m] = std::norm(row[m]);
    }
    return out;
}

FrequencyNodes shell_nodes(int k_lo, int k_hi, int panels_top) {
    if (k_lo > k_hi) throw ContractViolation("shell_nodes: empty shell range");
    FrequencyNodes f;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double a = std::ldexp(1.0, k), b = std::ldexp(1.0, k + 1);
        const int panels = k >= 0 ? panels_top : 1;
        std::vector<double> x, w;
        for (int q = 0; q < panels; ++q) append_panel(a + (b - a) * q / panels, a + (b - a) * (q + 1) / panels, x, w);
        for (std::size_t n = 0; n < x.size(); ++n) {
            for (double sgn : {-1.0, 1.0}) {
                f.xi.push_back(sgn * x[n]);
                f.weight.push_back(w[n]);
                f.shell.push_back(k);
            }
        }
    }
    return f;
}

double packet_output_fbar(double N, double amplitude, const PacketOutputOptions& q, const PacketOptions& o) {
    constexpr int kJ = 48;
    const FrequencyNodes nodes = shell_nodes(q.k_lowest, q.k_highest);
    const std::size_t n = nodes.xi.size();
    std::vector<std::vector<double>> ej(n, std::vector<double>(kJ, 0.0));
    std::vector<std::vector<double>> coarse(n, std::vector<double>(o.coarse_nt, 0.0));
    parallel_for(n, 0, [&](std::size_t i) {
        const double xi = nodes.xi[i];
        const double e0 = lp::eta0(xi, o.profile);
        if (q.low_projection && e0 == 0.0) return;
        PacketCut cut;
        if (q.cut) {
            const auto c = q.cut(xi);
            if (!c) return;
            cut = *c;
        }
        const double proj = q.low_projection ? e0 * e0 : 1.0;
        const PacketSlice sl = packet_slice(N, amplitude, xi, o, cut);
        double peak = 0.0;
        for (double a : sl.spectrum_abs2) peak = std::max(peak, a);
        for (int m = 0; m < sl.nt; ++m) {
            const double a = sl.spectrum_abs2[m];
            if (a <= 1e-32 * peak) continue;
            const double as = std::abs(sl.sigma[m]);
            const int jc = as <= 1.0 ? 0 : static_cast<int>(std::floor(std::log2(as)));
            for (int j = std::max(0, jc - 1); j <= std::min(kJ - 1, jc + 2); ++j) {
                const double e = lp::eta(sl.sigma[m], j, o.profile);
                if (e != 0.0) ej[i][j] += proj * e * e * a * sl.dsigma;
            }
        }
        for (int c = 0; c < o.coarse_nt; ++c) coarse[i][c] = nodes.weight[i] * proj * e0 * e0 * sl.coarse_abs2[c];
    });
    std::vector<double> low(o.coarse_nt, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < o.coarse_nt; ++c) low[c] += coarse[i][c];
    double sq = *std::max_element(low.begin(), low.end());
    for (int k = 1; k <= q.k_highest + 2; ++k) {
        double xk = 0.0;
        for (int j = 0; j < kJ; ++j) {
            double e = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double w = lp::eta(nodes.xi[i], k, o.profile);
                if (w != 0.0) e += nodes.weight[i] * w * w * ej[i][j];
            }
            xk += std::pow(2.0, 0.5 * j) * std::sqrt(e);
        }
        const double v = std::pow(2.0, q.s * k) * xk;
        sq += v * v;
    }
    return std::sqrt(sq);
}

nlohmann::json DivergenceReport::to_json() const {
    nlohmann::json j;
    j["k_high"] = options.k_high;
    j["depth_max"] = options.depth_max;
    j["s"] = options.s;
    j["b"] = options.b;
    j["xsb_slope"] = xsb_slope;
    j["increment_at_4"] = increment_at_4;
    auto& r = j["rows"] = nlohmann::json::array();
    for (const auto& row : rows) {
        r.push_back({{"K", row.depth},
                     {"input_frequency", row.input_frequency},
                     {"xsb_partial", row.xsb_partial},
                     {"fbar_low", row.fbar_low},
                     {"shell_mass", row.shell_mass}});
    }
    return j;
}

DivergenceReport divergence_experiment(const DivergenceOptions& o) {
    if (o.depth_max < 0) throw ContractViolation("divergence_experiment: depth_max must be non-negative");
    if (o.k_high - o.depth_max < 1)
        throw ContractViolation("divergence_experiment: k_high must exceed depth_max so that N > 2^K at every depth");
    if (o.k_high > 22) throw ContractViolation("divergence_experiment: k_high above 22 exceeds the time-lattice budget");
    o.packet.profile.validate();

    DivergenceReport rep;
    rep.options = o;
    const FrequencyNodes all = shell_nodes(-o.depth_max, 0);
    for (int K = 0; K <= o.depth_max; ++K) {
        DivergenceRow row;
        row.depth = K;
        row.input_frequency = std::ldexp(1.0, o.k_high - o.depth_max + K);
        const double N = row.input_frequency;
        const double amp = 1.0 / packet_fbar_norm(N, -0.25, o.packet);

        std::vector<std::size_t> idx;
        for (std::size_t n = 0; n < all.xi.size(); ++n)
            if (all.shell[n] >= -K) idx.push_back(n);
        std::vector<double> mass(idx.size());
        std::vector<std::vector<double>> coarse(idx.size());
        parallel_for(idx.size(), 0, [&](std::size_t q) {
            const std::size_t n = idx[q];
            const PacketSlice sl = packet_slice(N, amp, all.xi[n], o.packet);
            double acc = 0.0;
            for (int m = 0; m < sl.nt; ++m)
                acc += std::pow(1.0 + sl.sigma[m] * sl.sigma[m], o.b) * sl.spectrum_abs2[m];
            mass[q] = all.weight[n] * std::pow(1.0 + all.xi[n] * all.xi[n], o.s) * acc * sl.dsigma;
            const double e = lp::eta0(all.xi[n], o.packet.profile);
            coarse[q] = sl.coarse_abs2;
            for (double& c : coarse[q]) c *= all.weight[n] * e * e;
        });

        row.shell_mass.assign(K + 1, 0.0);
        std::vector<double> low(o.packet.coarse_nt, 0.0);
        for (std::size_t q = 0; q < idx.size(); ++q) {
            row.shell_mass[-all.shell[idx[q]]] += mass[q];
            for (int c = 0; c < o.packet.coarse_nt; ++c) low[c] += coarse[q][c];
        }
        for (double m : row.shell_mass) row.xsb_partial += m;
        row.fbar_low = std::sqrt(*std::max_element(low.begin(), low.end()));
        rep.rows.push_back(std::move(row));
    }

    std::vector<double> ks, sums;
    for (const auto& r : rep.rows) {
        ks.push_back(r.depth);
        sums.push_back(r.xsb_partial);
    }
    rep.xsb_slope = rep.rows.size() >= 2 ? ls_slope(ks, sums) : 0.0;
    if (o.depth_max >= 4) rep.increment_at_4 = rep.rows[4].shell_mass.back();
    return rep;
}

}  // namespace qslab

#include "qslab/regions.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "qslab/error.hpp"
#include "qslab/lp_frame.hpp"

namespace qslab {

using cplx = std::complex<double>;

std::string to_string(RegionLabel r) {
    switch (r) {
        case RegionLabel::A1: return "A1";
        case RegionLabel::A2: return "A2";
        case RegionLabel::A3: return "A3";
        case RegionLabel::A4: return "A4";
    }
    return "?";
}

RegionLabel region_classify(double xi, double xi1, double tau1, double tau2, int k1) {
    const double xi2 = xi - xi1;
    const double ax = std::abs(xi);
    if (ax <= std::ldexp(1.0, kRegionGap - k1)) return RegionLabel::A1;
    const double bound = std::ldexp(1.0, k1 - kRegionGap) * ax;
    if (std::abs(tau1 + xi1 * xi1) >= bound) return RegionLabel::A3;
    if (std::abs(tau2 - xi2 * xi2) >= bound) return RegionLabel::A4;
    return RegionLabel::A2;
}

nlohmann::json RegionSweep::to_json() const {
    return {{"k1", k1},
            {"density", density},
            {"points", points},
            {"A1", counts[0]},
            {"A2", counts[1]},
            {"A3", counts[2]},
            {"A4", counts[3]},
            {"min_denominator_ratio", min_denominator_ratio}};
}

RegionSweep region_sweep(int k1, double density) {
    if (k1 < 1 || k1 > 20) throw ContractViolation("region_sweep: k1 must lie in 1..20");
    if (!(density >= 1.0) || density > 64.0) throw ContractViolation("region_sweep: density must lie in [1, 64]");
    RegionSweep r;
    r.k1 = k1;
    r.density = density;
    r.min_denominator_ratio = std::numeric_limits<double>::infinity();
    const double hx = 1.0 / density;
    const double n1 = std::ldexp(1.0, k1);
    const double h1 = n1 / (16.0 * density);
    const double smax = std::ldexp(1.0, k1 - 3);
    const int ns = static_cast<int>(4 * density);
    const double hs = smax / ns;
    const int nxi = static_cast<int>(std::floor(1.6 / hx));
    for (int a = -nxi; a <= nxi; ++a) {
        const double xi = a * hx;
        if (std::abs(xi) >= 1.6) continue;
        for (double xi1 = 0.625 * n1; xi1 <= 1.6 * n1; xi1 += h1) {
            const double xi2 = xi - xi1;
            for (int m1 = -ns; m1 <= ns; ++m1) {
                const double s1 = m1 * hs;
                const double tau1 = s1 - xi1 * xi1;
                for (int m2 = -ns; m2 <= ns; ++m2) {
                    const double s2 = m2 * hs;
                    const double tau2 = s2 + xi2 * xi2;
                    const RegionLabel l = region_classify(xi, xi1, tau1, tau2, k1);
                    ++r.counts[static_cast<int>(l)];
                    ++r.points;
                    if (l != RegionLabel::A2) continue;
                    const double t1p = tau1 + xi1 * xi1, t2p = tau2 - xi2 * xi2;
                    const double denom = t1p + t2p - xi1 * xi1 + xi2 * xi2 + xi * xi;
                    r.min_denominator_ratio = std::min(r.min_denominator_ratio, std::abs(denom) / std::abs(xi * xi1));
                }
            }
        }
    }
    if (r.counts[1] == 0) r.min_denominator_ratio = 0.0;
    return r;
}

nlohmann::json TermIIReport::to_json() const {
    return {{"k1", k1},           {"a2_terms", a2_terms}, {"simpson_nodes", simpson_nodes},
            {"skipped", skipped}, {"defect", defect},     {"min_denominator_ratio", min_denominator_ratio}};
}

TermIIReport term_II_kernel_check(const TermIIOptions& o) {
    if (o.k1 < 3 || o.k1 > 12) throw ContractViolation("term_II_kernel_check: k1 must lie in 3..12");
    if (o.window < 4 || o.window % 2) throw ContractViolation("term_II_kernel_check: window must be even and >= 4");
    const int W = o.window;
    const double h = 1.0 / 16.0;
    const double N = std::ldexp(1.0, o.k1);
    const double smax = std::ldexp(1.0, o.k1 - 4) * 1.6;
    const double ds = smax / (W / 2);
    auto xi1_of = [&](int q) { return N + h * q; };
    auto xi2_of = [&](int q) { return -N - h * q; };
    auto sig = [&](int m) { return ds * (m - W / 2 + 0.5); };

    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> n01;
    std::vector<cplx> u(static_cast<std::size_t>(W) * W), w(u.size());
    for (auto& c : u) c = cplx(n01(rng), n01(rng));
    for (auto& c : w) c = cplx(n01(rng), n01(rng));
    if (o.zero_u) std::fill(u.begin(), u.end(), cplx(0.0));

    TermIIReport r;
    r.k1 = o.k1;
    r.min_denominator_ratio = std::numeric_limits<double>::infinity();
    const double checkpoints[4] = {0.25, 0.5, 0.75, 1.0};

    // Output frequencies xi = h d with eta0(xi) != 0.
    std::vector<int> ds_out;
    for (int d = -(W - 1); d <= W - 1; ++d)
        if (lp::eta0(h * d) != 0.0 && std::abs(h * d) > std::ldexp(1.0, kRegionGap - o.k1)) ds_out.push_back(d);

    auto prefactor = [&](double xi) { return lp::eta0(xi) * (o.with_derivative ? cplx(0.0, xi) : cplx(1.0)); };

    // Closed kernel, term by term.
    std::vector<cplx> closed(ds_out.size() * 4, 0.0);
    for (std::size_t a = 0; a < ds_out.size(); ++a) {
        const double xi = h * ds_out[a];
        const cplx pre = prefactor(xi);
        for (int q1 = 0; q1 < W; ++q1) {
            const int q2 = q1 - ds_out[a];
            if (q2 < 0 || q2 >= W) continue;
            const double xi1 = xi1_of(q1), xi2 = xi2_of(q2);
            for (int m1 = 0; m1 < W; ++m1) {
                const double tau1 = sig(m1) - xi1 * xi1;
                for (int m2 = 0; m2 < W; ++m2) {
                    const double tau2 = sig(m2) + xi2 * xi2;
                    if (region_classify(xi, xi1, tau1, tau2, o.k1) != RegionLabel::A2) continue;
                    ++r.a2_terms;
                    const double t1p = tau1 + xi1 * xi1, t2p = tau2 - xi2 * xi2;
                    const double den = t1p + t2p - xi1 * xi1 + xi2 * xi2 + xi * xi;
                    r.min_denominator_ratio = std::min(r.min_denominator_ratio, std::abs(den) / std::abs(xi * xi1));
                    const cplx c = pre * u[q1 * W + m1] * w[q2 * W + m2];
                    for (int k = 0; k < 4; ++k) {
                        const double t = checkpoints[k];
                        const cplx ker = den == 0.0 ? cplx(t) : (std::polar(1.0, t * den) - 1.0) / cplx(0.0, den);
                        closed[a * 4 + k] += c * ker;
                    }
                }
            }
        }
    }
    if (r.a2_terms == 0) r.min_denominator_ratio = 0.0;

    // Time domain: A2-masked lab-frame factors, composite Simpson from 0.
    const double a_bound = 2.0 * smax + 2.0 * 1.6 * (N + h * W) + 1.6 * 1.6;
    int M = static_cast<int>(std::ceil(a_bound / 0.1));
    M = (M + 7) / 8 * 8;
    r.simpson_nodes = static_cast<std::size_t>(M) + 1;
    const double dt = 1.0 / M;
    std::vector<cplx> acc(ds_out.size(), 0.0), timed(ds_out.size() * 4, 0.0);
    std::vector<unsigned char> mask1(static_cast<std::size_t>(W) * W), mask2(mask1.size());
    std::vector<cplx> e(W);
    for (std::size_t a = 0; a < ds_out.size(); ++a) {
        const double xi = h * ds_out[a];
        const cplx pre = prefactor(xi);
        // A2 membership factorizes for fixed (xi, xi1): test each modulation with the other at 0.
        for (int q1 = 0; q1 < W; ++q1) {
            const int q2 = q1 - ds_out[a];
            if (q2 < 0 || q2 >= W) continue;
            const double xi1 = xi1_of(q1), xi2 = xi2_of(q2);
            for (int m = 0; m < W; ++m) {
                mask1[q1 * W + m] =
                    region_classify(xi, xi1, sig(m) - xi1 * xi1, xi2 * xi2, o.k1) == RegionLabel::A2;
                mask2[q1 * W + m] =
                    region_classify(xi, xi1, -xi1 * xi1, sig(m) + xi2 * xi2, o.k1) == RegionLabel::A2;
            }
        }
        cplx sum = 0.0;
        for (int n = 0; n <= M; ++n) {
            const double s = n * dt;
            for (int m = 0; m < W; ++m) e[m] = std::polar(1.0, s * sig(m));
            cplx f = 0.0;
            for (int q1 = 0; q1 < W; ++q1) {
                const int q2 = q1 - ds_out[a];
                if (q2 < 0 || q2 >= W) continue;
                const double xi1 = xi1_of(q1), xi2 = xi2_of(q2);
                cplx uu = 0.0, ww = 0.0;
                for (int m = 0; m < W; ++m) {
                    if (mask1[q1 * W + m]) uu += u[q1 * W + m] * e[m];
                    if (mask2[q1 * W + m]) ww += w[q2 * W + m] * e[m];
                }
                f += uu * std::polar(1.0, -s * xi1 * xi1) * ww * std::polar(1.0, s * xi2 * xi2);
            }
            f *= std::polar(1.0, s * xi * xi);
            const double wgt = (n == 0 || n % (M / 4) == 0) ? 1.0 : (n % 2 ? 4.0 : 2.0);
            sum += wgt * f;
            if (n > 0 && n % (M / 4) == 0) {
                const int k = n / (M / 4) - 1;
                timed[a * 4 + k] = pre * (acc[a] + sum * (dt / 3.0));
                acc[a] += sum * (dt / 3.0);
                sum = f;
            }
        }
    }

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < closed.size(); ++i) {
        num += std::norm(closed[i] - timed[i]);
        den += std::norm(closed[i]);
    }
    if (den == 0.0) {
        r.skipped = true;
        r.defect = 0.0;
        return r;
    }
    r.defect = std::sqrt(num / den);
    return r;
}

DecayRow region_decay(int k1, const PacketOptions& o) {
    if (k1 < 5 || k1 > 16) throw ContractViolation("region_decay: k1 must lie in 5..16 so that both pieces exist");
    const double N = std::ldexp(1.0, k1);
    // eta_{k1} = 1 across the packet, so X_{k1}(u) = amp pi^{1/4} C_psi.
    const double amp = 1.0 / (std::pow(std::numbers::pi, 0.25) * psi_modulation_constant(o));
    const double edge = std::ldexp(1.0, kRegionGap - k1);
    const double scale = std::ldexp(1.0, k1 - kRegionGap);
    PacketOutputOptions q;
    q.k_lowest = -20;
    q.k_highest = 0;
    q.low_projection = true;
    DecayRow row;
    row.k1 = k1;
    q.cut = [&](double xi) -> std::optional<PacketCut> {
        if (std::abs(xi) <= edge) return PacketCut{};
        return std::nullopt;
    };
    row.term_I = packet_output_fbar(N, amp, q, o);
    q.cut = [&](double xi) -> std::optional<PacketCut> {
        if (std::abs(xi) <= edge) return std::nullopt;
        return PacketCut{PacketPiece::outer, scale * std::abs(xi)};
    };
    row.term_III = packet_output_fbar(N, amp, q, o);
    return row;
}

}  // namespace qslab

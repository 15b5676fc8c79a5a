#include "qslab/wellposed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "qslab/error.hpp"
#include "qslab/norms.hpp"
#include "qslab/parallel.hpp"
#include "qslab/scan.hpp"

namespace qslab {

namespace {

void require_shell(const PhaseGrid& g, int k) {
    if (k < 0 || k > g.k_grid()) {
        std::ostringstream os;
        os << "shell k = " << k << " is outside 0..k_grid = " << g.k_grid() << " for this grid";
        throw ContractViolation(os.str());
    }
}

InitialData normalized(const PhaseGrid& g, std::vector<cplx> spec, double amp) {
    double n2 = 0.0;
    for (const cplx& c : spec) n2 += std::norm(c);
    n2 *= g.dxi();
    if (n2 == 0.0) throw ContractViolation("generated spectrum is empty on this grid");
    const double f = amp / std::sqrt(n2);
    for (cplx& c : spec) c *= f;
    return InitialData::from_spectrum(PhaseGrid::spatial(g.nx, g.xlen), spec);
}

std::vector<cplx> random_shell_spectrum(const PhaseGrid& g, int k, std::uint64_t seed, bool positive_only,
                                        const lp::CutoffProfile& p) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    std::vector<cplx> spec(g.nx);
    for (int i = 0; i < g.nx; ++i) {
        const double re = n01(rng), im = n01(rng);
        if (positive_only && g.xi(i) <= 0.0) continue;
        spec[i] = lp::eta(g.xi(i), k, p) * cplx(re, im);
    }
    return spec;
}

double log2_slope(const std::vector<int>& shells, const std::vector<double>& ratios) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (!(ratios[i] > 0.0)) continue;
        x.push_back(shells[i]);
        y.push_back(std::log2(ratios[i]));
    }
    if (x.size() < 2) return 0.0;
    if (*std::min_element(x.begin(), x.end()) == *std::max_element(x.begin(), x.end())) return 0.0;
    return ls_slope(x, y);
}

void finish(ConstantReport& r) {
    r.max_ratio = 0.0;
    for (double v : r.ratios) r.max_ratio = std::max(r.max_ratio, v);
    r.trend_slope = log2_slope(r.shells, r.ratios);
}

Field subtract(const Field& a, const Field& b) {
    std::vector<cplx> d(a.values().begin(), a.values().end());
    for (std::size_t n = 0; n < d.size(); ++n) d[n] -= b.values()[n];
    return Field(a.grid(), a.domain(), std::move(d));
}

Field add(const Field& a, const Field& b) {
    std::vector<cplx> d(a.values().begin(), a.values().end());
    for (std::size_t n = 0; n < d.size(); ++n) d[n] += b.values()[n];
    return Field(a.grid(), a.domain(), std::move(d));
}

}  // namespace

InitialData gaussian_data(const PhaseGrid& grid, double amp) {
    std::vector<cplx> v(grid.nx);
    for (int i = 0; i < grid.nx; ++i) v[i] = amp * std::exp(-0.5 * grid.x(i) * grid.x(i));
    return InitialData(PhaseGrid::spatial(grid.nx, grid.xlen), std::move(v));
}

InitialData shell_data(const PhaseGrid& grid, int k, std::uint64_t seed, double amp) {
    require_shell(grid, k);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<cplx> spec(grid.nx);
    for (int i = 0; i < grid.nx; ++i) spec[i] = std::polar(lp::eta(grid.xi(i), k), phase(rng));
    return normalized(grid, std::move(spec), amp);
}

InitialData random_shell_data(const PhaseGrid& grid, int k, std::uint64_t seed, double amp) {
    require_shell(grid, k);
    return normalized(grid, random_shell_spectrum(grid, k, seed, false, {}), amp);
}

PhaseGrid picard_grid() { return PhaseGrid::make(1024, 2048, 64.0 * std::numbers::pi, 16.0); }

nlohmann::json PicardReport::to_json() const {
    return {{"iterations", iterations},   {"contracted", contracted},       {"converged", converged},
            {"diff_norms", diff_norms},   {"ratios", ratios},               {"final_residual", final_residual},
            {"solution_l2", solution_l2}};
}

PicardResult picard_solve(const InitialData& phi, const PhaseGrid& grid, const PicardOptions& o) {
    if (o.max_iters < 1) throw ContractViolation("picard_solve: max_iters must be positive");
    o.profile.validate();
    const Field base = windowed_free_wave(phi, grid, o.profile);
    DuhamelOptions d;
    d.quadrature = o.quadrature;
    PicardReport rep;
    Field u = base;
    int growth = 0;
    for (int m = 0; m < o.max_iters; ++m) {
        const Field b = duhamel_bilinear(u, u, d, o.profile);
        std::vector<cplx> next(base.values().begin(), base.values().end());
        for (std::size_t n = 0; n < next.size(); ++n) next[n] -= cplx(0.0, 1.0) * b.values()[n];
        Field un(grid, Domain::physical, std::move(next));
        double diff = 0.0;
        bool finite = true;
        for (const cplx& c : un.values()) {
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
                finite = false;
                break;
            }
        }
        if (finite) {
            try {
                diff = fbar_norm(subtract(un, u), o.s, o.profile).total;
            } catch (const ContractViolation&) {
                // Iterate has left the resolved band of the lattice.
                finite = false;
            }
        }
        rep.iterations = m + 1;
        if (!finite || !std::isfinite(diff)) {
            rep.diff_norms.push_back(std::numeric_limits<double>::infinity());
            rep.contracted = false;
            break;
        }
        if (!rep.diff_norms.empty()) {
            const double prev = rep.diff_norms.back();
            rep.ratios.push_back(prev > 0.0 ? diff / prev : 0.0);
            growth = diff > prev ? growth + 1 : 0;
        }
        rep.diff_norms.push_back(diff);
        u = std::move(un);
        if (growth >= 2) {
            rep.contracted = false;
            break;
        }
        if (diff < o.tol) {
            rep.converged = true;
            break;
        }
    }
    if (rep.contracted) rep.final_residual = residual(u, phi, o.profile);
    rep.solution_l2 = l2_norm(u);
    return {std::move(u), std::move(rep)};
}

nlohmann::json ConstantReport::to_json() const {
    return {{"s", s},
            {"seed", seed},
            {"fixture", fixture},
            {"max_ratio", max_ratio},
            {"skipped", skipped},
            {"trend_slope", trend_slope},
            {"shells", shells},
            {"ratios", ratios}};
}

ConstantReport linear_estimate_experiment(const PhaseGrid& grid, const EnsembleOptions& o) {
    ConstantReport r;
    r.s = o.s;
    r.seed = o.seed;
    const int k_top = grid.k_grid();
    auto ratio_of = [&](const InitialData& phi) {
        const double h = hs_norm(phi, o.s);
        if (h == 0.0) return -1.0;
        return fbar_norm(windowed_free_wave(phi, grid, o.profile), o.s, o.profile).total / h;
    };
    r.fixture = ratio_of(shell_data(grid, 1, o.seed));
    std::vector<int> shells(o.ensemble_size);
    std::vector<double> ratios(o.ensemble_size);
    parallel_for(o.ensemble_size, resolve_workers(o.workers), [&](std::size_t i) {
        const std::uint64_t sd = derive_seed(o.seed, {static_cast<std::int64_t>(i)});
        const int k = static_cast<int>(splitmix64(sd) % static_cast<std::uint64_t>(k_top + 1));
        shells[i] = k;
        ratios[i] = ratio_of(random_shell_data(grid, k, sd));
    });
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (ratios[i] < 0.0) {
            ++r.skipped;
            continue;
        }
        r.shells.push_back(shells[i]);
        r.ratios.push_back(ratios[i]);
    }
    finish(r);
    return r;
}

PhaseGrid bilinear_grid() { return PhaseGrid::make(256, 2048, 16.0 * std::numbers::pi, 16.0); }

double bilinear_ratio(const Field& u, const Field& v, double s, const lp::CutoffProfile& p) {
    const double us = fbar_norm(u, s, p).total, vs = fbar_norm(v, s, p).total;
    const double u0 = s == -0.25 ? us : fbar_norm(u, -0.25, p).total;
    const double v0 = s == -0.25 ? vs : fbar_norm(v, -0.25, p).total;
    const double den = us * v0 + u0 * vs;
    if (den == 0.0) return 0.0;
    DuhamelOptions d;
    d.quadrature = TimeQuadrature::spectral;
    return fbar_norm(duhamel_bilinear(u, v, d, p), s, p).total / den;
}

Field single_shell_wave(int k, const lp::CutoffProfile& p) {
    const PhaseGrid g = bilinear_grid();
    require_shell(g, k);
    std::vector<cplx> spec(g.nx);
    for (int i = 0; i < g.nx; ++i)
        if (g.xi(i) > 0.0) spec[i] = lp::eta(g.xi(i), k, p);
    return windowed_free_wave(normalized(g, std::move(spec), 1.0), g, p);
}

ConstantReport bilinear_estimate_experiment(const EnsembleOptions& o) {
    if (o.s < -0.25 || o.s > 0.0) throw ContractViolation("bilinear_estimate_experiment needs -1/4 <= s <= 0");
    const PhaseGrid g = bilinear_grid();
    ConstantReport r;
    r.s = o.s;
    r.seed = o.seed;
    {
        const Field u = single_shell_wave(kBilinearTopShell, o.profile);
        r.fixture = bilinear_ratio(u, u, o.s, o.profile);
    }
    std::vector<int> shells(o.ensemble_size);
    std::vector<double> ratios(o.ensemble_size);
    parallel_for(o.ensemble_size, resolve_workers(o.workers), [&](std::size_t i) {
        const std::uint64_t sd = derive_seed(o.seed, {static_cast<std::int64_t>(i)});
        const int k1 = 1 + static_cast<int>(splitmix64(sd) % kBilinearTopShell);
        const int k2 = 1 + static_cast<int>(splitmix64(sd ^ 0x5bd1e995ULL) % kBilinearTopShell);
        auto wave = [&](int k, std::uint64_t seed) {
            return windowed_free_wave(normalized(g, random_shell_spectrum(g, k, seed, true, o.profile), 1.0), g,
                                      o.profile);
        };
        const Field u = wave(k1, derive_seed(sd, {1})), v = wave(k2, derive_seed(sd, {2}));
        shells[i] = std::max(k1, k2);
        ratios[i] = bilinear_ratio(u, v, o.s, o.profile);
    });
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (ratios[i] == 0.0) {
            ++r.skipped;
            continue;
        }
        r.shells.push_back(shells[i]);
        r.ratios.push_back(ratios[i]);
    }
    finish(r);
    return r;
}

std::vector<AdversarialRow> adversarial_ratios(int k_lo, int k_hi, const PacketOptions& o) {
    if (k_lo < 1 || k_hi < k_lo || k_hi > 16) throw ContractViolation("adversarial_ratios: need 1 <= k_lo <= k_hi <= 16");
    std::vector<AdversarialRow> rows;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double N = std::ldexp(1.0, k);
        const double amp = 1.0 / packet_fbar_norm(N, -0.25, o);
        rows.push_back({k, 0.5 * packet_output_fbar(N, amp, {}, o)});
    }
    return rows;
}

nlohmann::json DecompositionReport::to_json() const {
    return {{"A", parts[0]}, {"B", parts[1]}, {"C", parts[2]}, {"D", parts[3]},
            {"E", parts[4]}, {"total", total}, {"reassembly_defect", reassembly_defect}};
}

DecompositionReport decomposition_accounting(const Field& u, const Field& v, double s, const lp::CutoffProfile& p) {
    if (!(u.grid() == v.grid())) throw ContractViolation("decomposition_accounting: inputs live on different grids");
    DuhamelOptions d;
    d.quadrature = TimeQuadrature::spectral;
    const Field uh = project_high(u, 1, p), ul = project_low(u, 0, p);
    const Field vh = project_high(v, 1, p), vl = project_low(v, 0, p);
    const Field whole = duhamel_bilinear(u, v, d, p);
    const Field pieces[5] = {project_high(duhamel_bilinear(uh, vh, d, p), 1, p),
                             project_high(duhamel_bilinear(uh, vl, d, p), 1, p),
                             project_high(duhamel_bilinear(ul, vh, d, p), 1, p),
                             project_high(duhamel_bilinear(ul, vl, d, p), 1, p), project_low(whole, 0, p)};
    DecompositionReport r;
    Field sum = pieces[0];
    for (int i = 0; i < 5; ++i) {
        r.parts[i] = fbar_norm(pieces[i], s, p).total;
        if (i > 0) sum = add(sum, pieces[i]);
    }
    r.total = fbar_norm(whole, s, p).total;
    const double ref = l2_norm(whole);
    r.reassembly_defect = ref == 0.0 ? l2_norm(sum) : l2_norm(subtract(sum, whole)) / ref;
    return r;
}

ConstantReport embedding_experiment(const EmbeddingOptions& o) {
    if (o.k_lo < 1 || o.k_hi < o.k_lo) throw ContractViolation("embedding_experiment: need 1 <= k_lo <= k_hi");
    constexpr int nx = 256, nt = 128;
    const double tlen = 16.0;
    ConstantReport r;
    r.s = 0.0;
    r.seed = o.seed;
    const int nk = o.k_hi - o.k_lo + 1;
    const std::size_t total = static_cast<std::size_t>(nk) * o.draws;
    std::vector<int> shells(total);
    std::vector<double> ratios(total);
    parallel_for(total, resolve_workers(o.workers), [&](std::size_t idx) {
        const int k = o.k_lo + static_cast<int>(idx / o.draws);
        const auto draw = static_cast<std::int64_t>(idx % o.draws);
        const PhaseGrid g = PhaseGrid::make(nx, nt, 128.0 * std::numbers::pi / std::ldexp(1.0, k), tlen);
        if (o.sigma_cap >= g.tau_nyquist()) throw ContractViolation("embedding_experiment: sigma cap beyond lattice");
        std::mt19937_64 rng(derive_seed(o.seed, {k, draw}));
        std::normal_distribution<double> n01;
        std::vector<cplx> a(g.size());
        for (int i = 0; i < nx; ++i) {
            const double e = lp::eta(g.xi(i), k);
            for (int m = 0; m < nt; ++m) {
                const double re = n01(rng), im = n01(rng);
                if (e != 0.0 && std::abs(g.tau(m)) <= o.sigma_cap)
                    a[static_cast<std::size_t>(i) * nt + m] = e * cplx(re, im);
            }
        }
        const ModField f(g, std::move(a));
        shells[idx] = k;
        ratios[idx] = linf_l2(f) / xk_norm(f, k).total;
    });
    r.shells = std::move(shells);
    r.ratios = std::move(ratios);
    for (std::size_t i = 0; i < r.ratios.size(); ++i)
        if (r.shells[i] == o.k_lo) r.fixture = std::max(r.fixture, r.ratios[i]);
    finish(r);
    return r;
}

}  // namespace qslab

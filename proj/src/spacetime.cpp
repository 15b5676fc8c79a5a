#include "qslab/spacetime.hpp"

#include <cmath>
#include <numbers>

#include "fourier.hpp"
#include "qslab/error.hpp"

namespace qslab {

using fourier::Direction;

namespace {

void require_domain(const Field& f, Domain d, const char* what) {
    if (f.domain() != d)
        throw ContractViolation(std::string(what) + (d == Domain::physical ? " needs a physical field"
                                                                           : " needs a spectral field"));
}

// Multiplies row i of an [nx][nt] array by e^{sign i t_m xi_i^2}.
void apply_comoving_phase(std::vector<cplx>& a, const PhaseGrid& g, double sign) {
    for (int i = 0; i < g.nx; ++i) {
        const double xi2 = g.xi(i) * g.xi(i);
        cplx* row = a.data() + static_cast<std::size_t>(i) * g.nt;
        for (int m = 0; m < g.nt; ++m) row[m] *= std::polar(1.0, sign * g.t(m) * xi2);
    }
}

template <class Symbol>
void apply_spatial_symbol(std::vector<cplx>& a, const PhaseGrid& g, Symbol&& symbol) {
    for (int i = 0; i < g.nx; ++i) {
        const double s = symbol(g.xi(i));
        cplx* row = a.data() + static_cast<std::size_t>(i) * g.nt;
        for (int m = 0; m < g.nt; ++m) row[m] *= s;
    }
}

template <class Symbol>
Field multiplier(const Field& u, Symbol&& symbol) {
    const PhaseGrid& g = u.grid();
    std::vector<cplx> a(u.values().begin(), u.values().end());
    if (u.domain() == Domain::physical) fourier::along_x(a.data(), g, Direction::forward);
    apply_spatial_symbol(a, g, symbol);
    if (u.domain() == Domain::physical) fourier::along_x(a.data(), g, Direction::inverse);
    return Field(g, u.domain(), std::move(a));
}

template <class Symbol>
InitialData multiplier(const InitialData& phi, Symbol&& symbol) {
    const PhaseGrid& g = phi.grid();
    std::vector<cplx> s = phi.spectrum();
    for (int i = 0; i < g.nx; ++i) s[i] *= symbol(g.xi(i));
    return InitialData::from_spectrum(g, s);
}

void require_duhamel_window(const PhaseGrid& g, const lp::CutoffProfile& p) {
    if (0.5 * g.tlen < 4.0 * p.outer_support)
        throw ContractViolation("time window [-" + std::to_string(0.5 * g.tlen) + ", " + std::to_string(0.5 * g.tlen) +
                                ") does not contain supp psi(t/4) = [-" + std::to_string(4.0 * p.outer_support) + ", " +
                                std::to_string(4.0 * p.outer_support) + "]");
}

}  // namespace

Field to_spectral(const Field& physical) {
    require_domain(physical, Domain::physical, "to_spectral");
    const PhaseGrid& g = physical.grid();
    std::vector<cplx> a(physical.values().begin(), physical.values().end());
    fourier::along_x(a.data(), g, Direction::forward);
    fourier::along_t(a.data(), g, Direction::forward);
    return Field(g, Domain::spectral, std::move(a));
}

Field to_physical(const Field& spectral) {
    require_domain(spectral, Domain::spectral, "to_physical");
    const PhaseGrid& g = spectral.grid();
    std::vector<cplx> a(spectral.values().begin(), spectral.values().end());
    fourier::along_t(a.data(), g, Direction::inverse);
    fourier::along_x(a.data(), g, Direction::inverse);
    return Field(g, Domain::physical, std::move(a));
}

std::vector<cplx> comoving_profile(const Field& physical) {
    require_domain(physical, Domain::physical, "comoving_profile");
    const PhaseGrid& g = physical.grid();
    std::vector<cplx> a(physical.values().begin(), physical.values().end());
    fourier::along_x(a.data(), g, Direction::forward);
    apply_comoving_phase(a, g, +1.0);
    return a;
}

ModField to_modulation(const Field& physical) {
    const PhaseGrid& g = physical.grid();
    std::vector<cplx> a = comoving_profile(physical);
    fourier::along_t(a.data(), g, Direction::forward);
    return ModField(g, std::move(a));
}

Field from_modulation(const ModField& comoving) {
    if (!comoving.comoving()) throw ContractViolation("from_modulation needs a co-moving spectrum");
    const PhaseGrid& g = comoving.grid();
    std::vector<cplx> a(comoving.values().begin(), comoving.values().end());
    fourier::along_t(a.data(), g, Direction::inverse);
    apply_comoving_phase(a, g, -1.0);
    fourier::along_x(a.data(), g, Direction::inverse);
    return Field(g, Domain::physical, std::move(a));
}

ModField modulation_view(const Field& f) {
    if (f.domain() == Domain::physical) return to_modulation(f);
    const PhaseGrid& g = f.grid();
    std::vector<double> shift(g.nx);
    for (int i = 0; i < g.nx; ++i) shift[i] = g.xi(i) * g.xi(i);
    return ModField(g, std::vector<cplx>(f.values().begin(), f.values().end()), std::move(shift));
}

Field free_evolve(const InitialData& phi, const PhaseGrid& grid) {
    if (phi.grid().nx != grid.nx || phi.grid().xlen != grid.xlen)
        throw ContractViolation("free_evolve: initial data and grid disagree on the x lattice");
    const std::vector<cplx> s = phi.spectrum();
    std::vector<cplx> a(grid.size());
    for (int i = 0; i < grid.nx; ++i) {
        const double xi2 = grid.xi(i) * grid.xi(i);
        cplx* row = a.data() + static_cast<std::size_t>(i) * grid.nt;
        for (int m = 0; m < grid.nt; ++m) row[m] = s[i] * std::polar(1.0, -grid.t(m) * xi2);
    }
    fourier::along_x(a.data(), grid, Direction::inverse);
    return Field(grid, Domain::physical, std::move(a));
}

InitialData free_evolve_at(const InitialData& phi, double t) {
    const PhaseGrid& g = phi.grid();
    std::vector<cplx> s = phi.spectrum();
    for (int i = 0; i < g.nx; ++i) s[i] *= std::polar(1.0, -t * g.xi(i) * g.xi(i));
    return InitialData::from_spectrum(g, s);
}

Field windowed_free_wave(const InitialData& phi, const PhaseGrid& grid, const lp::CutoffProfile& p) {
    std::vector<cplx> a = std::move(free_evolve(phi, grid)).release();
    for (int i = 0; i < grid.nx; ++i) {
        cplx* row = a.data() + static_cast<std::size_t>(i) * grid.nt;
        for (int m = 0; m < grid.nt; ++m) row[m] *= lp::psi(grid.t(m), p);
    }
    return Field(grid, Domain::physical, std::move(a));
}

Field project(const Field& u, int k, const lp::CutoffProfile& p) {
    return multiplier(u, [&](double xi) { return lp::eta(xi, k, p); });
}

Field project_low(const Field& u, int l, const lp::CutoffProfile& p) {
    return multiplier(u, [&](double xi) { return lp::eta_low(xi, l, p); });
}

Field project_high(const Field& u, int l, const lp::CutoffProfile& p) {
    return multiplier(u, [&](double xi) { return 1.0 - lp::eta_low(xi, l - 1, p); });
}

InitialData project(const InitialData& phi, int k, const lp::CutoffProfile& p) {
    return multiplier(phi, [&](double xi) { return lp::eta(xi, k, p); });
}

InitialData project_low(const InitialData& phi, int l, const lp::CutoffProfile& p) {
    return multiplier(phi, [&](double xi) { return lp::eta_low(xi, l, p); });
}

void cumulative_integral(std::span<cplx> row, double dt, int origin, TimeQuadrature q) {
    const int n = static_cast<int>(row.size());
    if (origin < 0 || origin >= n) throw ContractViolation("cumulative_integral origin out of range");
    if (q == TimeQuadrature::trapezoid) {
        std::vector<cplx> g(row.begin(), row.end());
        row[origin] = 0.0;
        for (int m = origin + 1; m < n; ++m) row[m] = row[m - 1] + 0.5 * dt * (g[m - 1] + g[m]);
        for (int m = origin - 1; m >= 0; --m) row[m] = row[m + 1] - 0.5 * dt * (g[m] + g[m + 1]);
        return;
    }
    // Exact antiderivative of the trigonometric interpolant, mode by mode.
    const double period = n * dt;
    std::vector<cplx> c(row.begin(), row.end());
    fourier::dft(c.data(), n, 1, 1, n, -1);
    const cplx mean = c[0] / static_cast<double>(n);
    for (int l = 0; l < n; ++l) {
        const int lp = l < n / 2 ? l : l - n;
        if (l == 0 || l == n / 2) {
            c[l] = 0.0;
            continue;
        }
        const double omega = 2.0 * std::numbers::pi * lp / period;
        c[l] /= cplx(0.0, omega) * static_cast<double>(n);
    }
    fourier::dft(c.data(), n, 1, 1, n, +1);
    const cplx base = c[origin];
    for (int m = 0; m < n; ++m) row[m] = c[m] - base + mean * ((m - origin) * dt);
}

std::vector<cplx> duhamel_comoving(const PhaseGrid& g, std::span<const cplx> source_hat, TimeQuadrature q,
                                   const lp::CutoffProfile& p) {
    require_duhamel_window(g, p);
    if (source_hat.size() != g.size()) throw ContractViolation("duhamel source does not match grid");
    std::vector<cplx> a(source_hat.begin(), source_hat.end());
    std::vector<double> window(g.nt), outer(g.nt);
    for (int m = 0; m < g.nt; ++m) {
        const double s = lp::psi(g.t(m), p);
        window[m] = s * s;
        outer[m] = lp::psi(0.25 * g.t(m), p);
    }
    for (int i = 0; i < g.nx; ++i) {
        const double xi2 = g.xi(i) * g.xi(i);
        std::span<cplx> row(a.data() + static_cast<std::size_t>(i) * g.nt, g.nt);
        for (int m = 0; m < g.nt; ++m) row[m] *= window[m] * std::polar(1.0, g.t(m) * xi2);
        cumulative_integral(row, g.dt(), g.t0_index(), q);
        for (int m = 0; m < g.nt; ++m) row[m] *= outer[m];
    }
    return a;
}

Field duhamel_bilinear(const Field& u, const Field& v, const DuhamelOptions& opts, const lp::CutoffProfile& p) {
    require_domain(u, Domain::physical, "duhamel_bilinear");
    require_domain(v, Domain::physical, "duhamel_bilinear");
    if (!(u.grid() == v.grid())) throw ContractViolation("duhamel_bilinear: inputs live on different grids");
    const PhaseGrid& g = u.grid();
    require_duhamel_window(g, p);
    std::vector<cplx> f(g.size());
    for (std::size_t n = 0; n < f.size(); ++n)
        f[n] = u.values()[n] * (opts.with_conjugate ? std::conj(v.values()[n]) : v.values()[n]);
    fourier::along_x(f.data(), g, Direction::forward);
    if (opts.with_derivative) {
        for (int i = 0; i < g.nx; ++i) {
            const cplx d(0.0, g.xi(i));
            cplx* row = f.data() + static_cast<std::size_t>(i) * g.nt;
            for (int m = 0; m < g.nt; ++m) row[m] *= d;
        }
    }
    std::vector<cplx> w = duhamel_comoving(g, f, opts.quadrature, p);
    apply_comoving_phase(w, g, -1.0);
    fourier::along_x(w.data(), g, Direction::inverse);
    return Field(g, Domain::physical, std::move(w));
}

double residual(const Field& u, const InitialData& phi, const lp::CutoffProfile& p) {
    require_domain(u, Domain::physical, "residual");
    const PhaseGrid& g = u.grid();
    if (phi.grid().nx != g.nx || phi.grid().xlen != g.xlen)
        throw ContractViolation("residual: initial data and field disagree on the x lattice");

    // i e^{-it xi^2} d_t w with w the co-moving profile, derivative taken spectrally in t.
    std::vector<cplx> w = comoving_profile(u);
    fourier::dft(w.data(), g.nt, 1, g.nx, g.nt, -1);
    for (int i = 0; i < g.nx; ++i) {
        cplx* row = w.data() + static_cast<std::size_t>(i) * g.nt;
        for (int l = 0; l < g.nt; ++l) {
            const int lp = l < g.nt / 2 ? l : l - g.nt;
            const double omega = l == g.nt / 2 ? 0.0 : g.dtau() * lp;
            row[l] *= cplx(0.0, omega) / static_cast<double>(g.nt);
        }
    }
    fourier::dft(w.data(), g.nt, 1, g.nx, g.nt, +1);
    apply_comoving_phase(w, g, -1.0);

    std::vector<cplx> src(g.size());
    for (int i = 0; i < g.nx; ++i)
        for (int m = 0; m < g.nt; ++m) {
            const std::size_t n = static_cast<std::size_t>(i) * g.nt + m;
            const double s = lp::psi(g.t(m), p);
            src[n] = s * s * std::norm(u.values()[n]);
        }
    fourier::along_x(src.data(), g, Direction::forward);

    double acc = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int m = 0; m < g.nt; ++m) {
            if (std::abs(g.t(m)) > 1.0) continue;
            const std::size_t n = static_cast<std::size_t>(i) * g.nt + m;
            acc += std::norm(cplx(0.0, 1.0) * w[n] - src[n]);
        }
    const double dynamic = std::sqrt(acc * g.dxi() * g.dt());

    double init = 0.0;
    const int m0 = g.t0_index();
    for (int i = 0; i < g.nx; ++i) init += std::norm(u.at(i, m0) - phi.values()[i]);
    return dynamic + std::sqrt(init * g.dx());
}

double l2_norm(const Field& f) {
    const PhaseGrid& g = f.grid();
    double acc = 0.0;
    for (const cplx& z : f.values()) acc += std::norm(z);
    const double cell = f.domain() == Domain::physical ? g.dx() * g.dt() : g.dxi() * g.dtau();
    return std::sqrt(acc * cell);
}

double l2_norm(const InitialData& phi) {
    double acc = 0.0;
    for (const cplx& z : phi.values()) acc += std::norm(z);
    return std::sqrt(acc * phi.grid().dx());
}

}  // namespace qslab

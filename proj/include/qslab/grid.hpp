#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace qslab {

using cplx = std::complex<double>;

// Periodic phase-space lattice: x in [-xlen/2, xlen/2), t in [-tlen/2, tlen/2),
// with the centered dual lattice xi_i = (i - nx/2) dxi, tau_m = (m - nt/2) dtau.
struct PhaseGrid {
    int nx = 1024;
    int nt = 2048;
    double xlen = 0.0;
    double tlen = 16.0;

    static PhaseGrid make(int nx, int nt, double xlen, double tlen);
    // Spatial-only grid (nt = 1) used by InitialData.
    static PhaseGrid spatial(int nx, double xlen);

    void validate() const;

    double dx() const { return xlen / nx; }
    double dt() const { return tlen / nt; }
    double dxi() const;
    double dtau() const;
    double x(int i) const { return -0.5 * xlen + i * dx(); }
    double t(int m) const { return -0.5 * tlen + m * dt(); }
    double xi(int i) const { return (i - nx / 2) * dxi(); }
    double tau(int m) const { return (m - nt / 2) * dtau(); }
    int t0_index() const { return nt / 2; }
    double xi_nyquist() const;
    double tau_nyquist() const;
    // Largest shell index whose multiplier support sits inside the frequency lattice.
    int k_grid() const;

    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(nt); }
    bool operator==(const PhaseGrid&) const = default;
};

enum class Domain : std::uint8_t { physical = 0, spectral = 1 };

// Space-time samples, row-major with space (or frequency) as the slow index.
class Field {
public:
    Field(const PhaseGrid& grid, Domain domain, std::vector<cplx> values);
    static Field zeros(const PhaseGrid& grid, Domain domain);

    const PhaseGrid& grid() const { return grid_; }
    Domain domain() const { return domain_; }
    std::span<const cplx> values() const { return values_; }
    const cplx& at(int i, int m) const { return values_[static_cast<std::size_t>(i) * grid_.nt + m]; }
    std::vector<cplx> release() && { return std::move(values_); }

private:
    PhaseGrid grid_;
    Domain domain_;
    std::vector<cplx> values_;
};

// Spatial samples of initial data on the x-lattice of `grid` (nt is ignored).
class InitialData {
public:
    InitialData(const PhaseGrid& grid, std::vector<cplx> values);
    // Builds data from its continuum Fourier transform sampled on the xi lattice.
    static InitialData from_spectrum(const PhaseGrid& grid, std::span<const cplx> spectrum);

    const PhaseGrid& grid() const { return grid_; }
    std::span<const cplx> values() const { return values_; }
    // Continuum-normalized transform on the centered xi lattice.
    std::vector<cplx> spectrum() const;

private:
    PhaseGrid grid_;
    std::vector<cplx> values_;
};

// Spectral samples g(xi_i, sigma) with sigma = tau_m + shift_i. A co-moving spectrum
// (shift 0) is the time transform of e^{i t xi^2} u^(xi, t); a lab spectrum viewed through
// this type carries shift xi_i^2.
class ModField {
public:
    ModField(const PhaseGrid& grid, std::vector<cplx> values, std::vector<double> shift = {});

    const PhaseGrid& grid() const { return grid_; }
    std::span<const cplx> values() const { return values_; }
    const cplx& at(int i, int m) const { return values_[static_cast<std::size_t>(i) * grid_.nt + m]; }
    double sigma(int i, int m) const { return grid_.tau(m) + (shift_.empty() ? 0.0 : shift_[i]); }
    bool comoving() const { return shift_.empty(); }

private:
    PhaseGrid grid_;
    std::vector<cplx> values_;
    std::vector<double> shift_;
};

}  // namespace qslab

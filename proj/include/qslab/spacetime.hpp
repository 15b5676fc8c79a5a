#pragma once

#include <span>
#include <vector>

#include "qslab/grid.hpp"
#include "qslab/lp_frame.hpp"

namespace qslab {

Field to_spectral(const Field& physical);
Field to_physical(const Field& spectral);

// Co-moving spectrum: t-transform of e^{i t xi^2} u^(xi, t). Exact lattice bijection.
ModField to_modulation(const Field& physical);
Field from_modulation(const ModField& comoving);

// Modulation view of any field: physical input goes through the co-moving transform,
// spectral input is read literally with sigma = tau + xi^2.
ModField modulation_view(const Field& f);

// Co-moving profile w(xi, t) = e^{i t xi^2} u^(xi, t) of a physical field.
std::vector<cplx> comoving_profile(const Field& physical);

// W(t) phi sampled on every node of the grid's time lattice.
Field free_evolve(const InitialData& phi, const PhaseGrid& grid);
// W(t) phi at a single time.
InitialData free_evolve_at(const InitialData& phi, double t);
// psi(t) W(t) phi.
Field windowed_free_wave(const InitialData& phi, const PhaseGrid& grid, const lp::CutoffProfile& p = {});

// Spatial multipliers. Accept physical or spectral fields and return the same domain.
Field project(const Field& u, int k, const lp::CutoffProfile& p = {});
Field project_low(const Field& u, int l, const lp::CutoffProfile& p = {});
Field project_high(const Field& u, int l, const lp::CutoffProfile& p = {});
InitialData project(const InitialData& phi, int k, const lp::CutoffProfile& p = {});
InitialData project_low(const InitialData& phi, int l, const lp::CutoffProfile& p = {});

enum class TimeQuadrature { trapezoid, spectral };

struct DuhamelOptions {
    bool with_derivative = false;
    bool with_conjugate = true;
    TimeQuadrature quadrature = TimeQuadrature::trapezoid;
};

// psi(t/4) int_0^t W(t-s) psi(s)^2 F(s) ds with F = d_x(u v) or d_x(u conj v) per options.
// Physical fields in, physical field out.
Field duhamel_bilinear(const Field& u, const Field& v, const DuhamelOptions& opts = {},
                       const lp::CutoffProfile& p = {});

// Same operator applied to a precomputed source F in (xi, t) form, i.e. F^(xi, t_m).
// Returns the co-moving profile psi(t/4) int_0^t e^{i s xi^2} psi(s)^2 F^(xi, s) ds.
std::vector<cplx> duhamel_comoving(const PhaseGrid& g, std::span<const cplx> source_hat, TimeQuadrature q,
                                   const lp::CutoffProfile& p = {});

// In-place cumulative integral from node `origin` on a uniform periodic lattice, one row.
void cumulative_integral(std::span<cplx> row, double dt, int origin, TimeQuadrature q);

// L2 over |t| <= 1 of i e^{-it xi^2} d_t w - F_x(psi^2 |u|^2), plus ||u(0) - phi||_2.
double residual(const Field& u, const InitialData& phi, const lp::CutoffProfile& p = {});

// Measure-weighted L2 norms.
double l2_norm(const Field& f);
double l2_norm(const InitialData& phi);

}  // namespace qslab

#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "qslab/divergence.hpp"
#include "qslab/grid.hpp"
#include "qslab/lp_frame.hpp"
#include "qslab/spacetime.hpp"

namespace qslab {

// Initial data generators. Spectra are normalized to unit L^2 before scaling by amp.
InitialData gaussian_data(const PhaseGrid& grid, double amp);
// eta_k(xi) with seeded unimodular phases.
InitialData shell_data(const PhaseGrid& grid, int k, std::uint64_t seed, double amp = 1.0);
// eta_k(xi) times i.i.d. complex Gaussian coefficients.
InitialData random_shell_data(const PhaseGrid& grid, int k, std::uint64_t seed, double amp = 1.0);

// Picard grid: dt = 1/128 on a window that holds supp psi(t/4).
PhaseGrid picard_grid();

struct PicardOptions {
    int max_iters = 40;
    double tol = 1e-12;
    double s = -0.25;
    TimeQuadrature quadrature = TimeQuadrature::spectral;
    lp::CutoffProfile profile{};
};

struct PicardReport {
    int iterations = 0;
    bool contracted = true;
    bool converged = false;
    std::vector<double> diff_norms;
    std::vector<double> ratios;
    double final_residual = 0.0;
    double solution_l2 = 0.0;

    nlohmann::json to_json() const;
};

struct PicardResult {
    Field u;
    PicardReport report;
};

// u^{m+1} = psi W(t) phi - i B(u^m, u^m), conjugate on, no derivative.
PicardResult picard_solve(const InitialData& phi, const PhaseGrid& grid, const PicardOptions& o = {});

struct ConstantReport {
    double s = 0.0;
    std::uint64_t seed = 0;
    double fixture = 0.0;
    double max_ratio = 0.0;
    std::size_t skipped = 0;
    std::vector<int> shells;
    std::vector<double> ratios;
    // Least-squares slope of log2(ratio) against shell index.
    double trend_slope = 0.0;

    nlohmann::json to_json() const;
};

struct EnsembleOptions {
    std::size_t ensemble_size = 100;
    double s = -0.25;
    std::uint64_t seed = 1;
    int workers = 0;
    lp::CutoffProfile profile{};
};

// fbar(psi W phi, s) / hs(phi, s) for phi on random shells 0..k_top of `grid`.
ConstantReport linear_estimate_experiment(const PhaseGrid& grid, const EnsembleOptions& o);

// Grid and shells used by the random-pair bilinear ensemble: positive frequencies on
// shells 1..3, so u conj(v) stays inside the frequency lattice.
PhaseGrid bilinear_grid();
inline constexpr int kBilinearTopShell = 3;

// ||B(u,v)||_{F^s} / (||u||_{F^s} ||v||_{F^{-1/4}} + ||u||_{F^{-1/4}} ||v||_{F^s}); 0 when a side vanishes.
double bilinear_ratio(const Field& u, const Field& v, double s, const lp::CutoffProfile& p = {});

// u = psi W phi with phi^ = eta_k restricted to xi > 0, on bilinear_grid().
Field single_shell_wave(int k, const lp::CutoffProfile& p = {});

ConstantReport bilinear_estimate_experiment(const EnsembleOptions& o);

struct AdversarialRow {
    int k = 0;
    double ratio = 0.0;
};

// High x high -> low pair u = v = packet at N = 2^k (unit F-bar^{-1/4} norm), ratio
// ||B(u,u)||_{F^{-1/4}} / 2 evaluated semi-analytically.
std::vector<AdversarialRow> adversarial_ratios(int k_lo, int k_hi, const PacketOptions& o = {});

struct DecompositionReport {
    // A..E: high-high, high-low, low-high, low-low (all projected to P_{>=1}), and P_0 B(u,v).
    double parts[5] = {0, 0, 0, 0, 0};
    double total = 0.0;
    double reassembly_defect = 0.0;

    nlohmann::json to_json() const;
};

DecompositionReport decomposition_accounting(const Field& u, const Field& v, double s = -0.25,
                                             const lp::CutoffProfile& p = {});

struct EmbeddingOptions {
    int k_lo = 1, k_hi = 10;
    std::size_t draws = 100;
    std::uint64_t seed = 1;
    double sigma_cap = 16.0;
    int workers = 0;
};

// ||P_k u||_{L^inf L^2} / ||P_k u||_{X_k} for random modulation-limited fields on shell k.
// Shell k lives on a grid with xi step 2^k/64, so the lattice geometry is the same for every k.
ConstantReport embedding_experiment(const EmbeddingOptions& o);

}  // namespace qslab

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "qslab/lp_frame.hpp"

namespace qslab {

// Semi-analytic high x high -> low configuration. Both inputs are psi(t) W(t) phi_N with
// phi_N^(xi) = exp(-(xi - N)^2 / 2), scaled to unit F-bar^{-1/4} norm; the output is
// B(u, u) with conjugate on and no derivative. The source has the closed form
//   F^(xi, s) = A^2 psi(s)^4 2^{-1/2} e^{-xi^2/4} e^{-s^2 xi^2} e^{-2 i s N xi},
// so every output frequency is evaluated on its own time lattice.

struct PacketOptions {
    double tlen = 16.0;
    // Extra Nyquist headroom over the local oscillation rate.
    double rate_margin = 200.0;
    int coarse_nt = 256;
    lp::CutoffProfile profile{};
};

// sum_j 2^{j/2} ||eta_j(sigma) psi^(sigma)||_2 with psi^ the continuum transform of psi.
double psi_modulation_constant(const PacketOptions& o = {});

// ||psi(t) W(t) phi_N||_{F-bar^s}.
double packet_fbar_norm(double N, double s, const PacketOptions& o = {});

// One output frequency of B(u, u) in co-moving form.
struct PacketSlice {
    double xi = 0.0;
    int nt = 0;
    double dsigma = 0.0;
    std::vector<double> sigma;
    std::vector<double> spectrum_abs2;  // |B~(xi, sigma)|^2
    std::vector<double> coarse_abs2;    // |B^(xi, t)|^2 on the common coarse time lattice
};

// Modulation cut on both factors: psi = psi_R + (psi - psi_R) with psi_R the part of psi
// whose time frequencies satisfy |sigma| < radius. `inner` keeps psi_R psi_R, `outer` the rest.
enum class PacketPiece { whole, inner, outer };
struct PacketCut {
    PacketPiece piece = PacketPiece::whole;
    double radius = 0.0;
};

PacketSlice packet_slice(double N, double amplitude, double xi, const PacketOptions& o = {}, PacketCut cut = {});

// Composite Gauss-Legendre nodes over the two-sided dyadic shells 2^k < |xi| <= 2^{k+1}.
struct FrequencyNodes {
    std::vector<double> xi;
    std::vector<double> weight;
    std::vector<int> shell;
};
FrequencyNodes shell_nodes(int k_lo, int k_hi, int panels_top = 4);

// F-bar^s norm of the (optionally P_0-projected) output B(u, u) over output shells down to
// 2^{k_lowest}; `cut` selects the piece per output frequency, zero amplitude when it returns nullopt.
struct PacketOutputOptions {
    double s = -0.25;
    int k_lowest = -20;
    int k_highest = 3;
    bool low_projection = false;
    std::function<std::optional<PacketCut>(double)> cut;
};
double packet_output_fbar(double N, double amplitude, const PacketOutputOptions& q, const PacketOptions& o = {});

struct DivergenceOptions {
    int k_high = 14;
    int depth_max = 12;
    double s = -0.25;
    double b = 0.5;
    PacketOptions packet{};
};

struct DivergenceRow {
    int depth = 0;
    double input_frequency = 0.0;
    std::vector<double> shell_mass;  // X^{s,b} mass per k3 = 0, -1, ..., -depth
    double xsb_partial = 0.0;
    double fbar_low = 0.0;
};

struct DivergenceReport {
    DivergenceOptions options;
    std::vector<DivergenceRow> rows;
    double xsb_slope = 0.0;
    double increment_at_4 = 0.0;

    nlohmann::json to_json() const;
};

// At depth K the inputs sit at N = 2^{k_high - depth_max + K}, output shells k3 in [-K, 0].
DivergenceReport divergence_experiment(const DivergenceOptions& o = {});

}  // namespace qslab

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qslab/divergence.hpp"

namespace qslab {

enum class RegionLabel { A1, A2, A3, A4 };

std::string to_string(RegionLabel r);

// Threshold exponent for the "much less" / "at least comparable" comparisons.
inline constexpr int kRegionGap = 5;

// Partition of the output hyperplane for P_0 B(P_{k1} u, P_{k2} conj v), xi2 = xi - xi1.
// A1: |xi| <= 2^{5-k1}; A3: |tau1 + xi1^2| >= 2^{k1-5}|xi|; A4: |tau2 - xi2^2| >= 2^{k1-5}|xi|; else A2.
RegionLabel region_classify(double xi, double xi1, double tau1, double tau2, int k1);

struct RegionSweep {
    int k1 = 0;
    double density = 0.0;
    std::size_t counts[4] = {0, 0, 0, 0};
    std::size_t points = 0;
    // min over A2 points of |tau1 + tau2 - xi1^2 + xi2^2 + xi^2| / |xi xi1| in primed variables.
    double min_denominator_ratio = 0.0;

    nlohmann::json to_json() const;
};

// Lattice sweep: xi on (-1.6, 1.6) with step 1/density, xi1 over the positive support of
// eta_{k1} with step 2^{k1}/(16 density), both modulations on [-2^{k1-3}, 2^{k1-3}] with
// 4 density points per side.
RegionSweep region_sweep(int k1, double density);

struct TermIIOptions {
    int k1 = 6;
    int window = 64;
    std::uint64_t seed = 1;
    bool with_derivative = true;
    // Zero input blocks, for the degenerate case.
    bool zero_u = false;
};

struct TermIIReport {
    int k1 = 0;
    std::size_t a2_terms = 0;
    std::size_t simpson_nodes = 0;
    bool skipped = false;
    double defect = 0.0;
    double min_denominator_ratio = 0.0;

    nlohmann::json to_json() const;
};

// Term II on A2 for random window x window modulation blocks u (xi1 near 2^{k1}) and
// conj v (xi2 near -2^{k1}): closed kernel (e^{ita} - 1)/(ia) against composite Simpson in time.
TermIIReport term_II_kernel_check(const TermIIOptions& o = {});

struct DecayRow {
    int k1 = 0;
    double term_I = 0.0;    // A1 piece
    double term_III = 0.0;  // A3 u A4 piece
};

// F-bar^{-1/4} norms of the A1 and A3 u A4 pieces of P_0 B(u, conj v) for the packet pair at
// N = 2^{k1}, inputs scaled to unit X_{k1} norm.
DecayRow region_decay(int k1, const PacketOptions& o = {});

}  // namespace qslab

#pragma once

#include <cstdint>

#include "qslab/blocks.hpp"

namespace qslab {

struct MeasureOptions {
    double density = 8.0;
    int restarts = 16;
    std::uint64_t seed = 1;
    Sidedness sidedness = Sidedness::two_sided;
    int max_sweeps = 2000;
    int inner_iterations = 2;
    double tolerance = 1e-9;
    // Refuse lattices whose segment workload exceeds this many point pairs.
    double max_work = 4e9;
};

struct MeasuredNorm {
    double value = 0.0;
    int iterations = 0;
    int restarts = 0;
    bool converged = true;
    double density = 0.0;
    bool structural_zero = false;
    std::size_t lattice_points = 0;
};

// True when interval arithmetic proves no lattice pair of the input blocks lands in the
// output block (resonance rounding included).
bool structurally_zero(const BlockTriple& t, Sidedness side, const BlockLattice& lattice);

// Closed-form estimate of the workload of one bilinear application: point pairs plus block sizes.
double estimated_work(const BlockTriple& t, double density, Sidedness side);

// sup over unit u on D_{k2,j2} and unit v on the reflected D_{k3,j3} of ||1_{D_{k1,j1}} (u * v)||_2.
MeasuredNorm measure_block_norm(const BlockTriple& t, const MeasureOptions& opts = {});

struct OracleOptions {
    double density = 8.0;
    Sidedness sidedness = Sidedness::two_sided;
    std::uint64_t seed = 1;
    int random_starts = 64;
    std::size_t max_points = 4096;
};

// Brute-force reference: full incidence list of the trilinear form, block-coordinate ascent
// screened from up to 128 strided coordinate vectors of the v-block plus random starts, the
// best candidates refined and the leader finished with dense eigen solves.
double oracle_block_norm(const BlockTriple& t, const OracleOptions& opts = {});

}  // namespace qslab

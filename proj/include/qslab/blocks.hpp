#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace qslab {

// (k, j) labels a dyadic block: frequency shell 2^k, modulation shell 2^j (j >= 0).
struct DyadicIndex {
    int k = 0;
    int j = 0;
    bool operator==(const DyadicIndex&) const = default;
};

// Output block (k1, j1), u-block (k2, j2), reflected v-block (k3, j3).
struct BlockTriple {
    int k1 = 0, j1 = 0, k2 = 0, j2 = 0, k3 = 0, j3 = 0;

    static BlockTriple from(DyadicIndex out, DyadicIndex u, DyadicIndex v) {
        return {out.k, out.j, u.k, u.j, v.k, v.j};
    }
    std::array<int, 3> ks() const { return {k1, k2, k3}; }
    std::array<int, 3> js() const { return {j1, j2, j3}; }
    // Output and v-block exchanged.
    BlockTriple dual() const { return {k3, j3, k2, j2, k1, j1}; }
    // Parabolic dilation: every k by m, every j by 2m.
    BlockTriple dilated(int m) const { return {k1 + m, j1 + 2 * m, k2 + m, j2 + 2 * m, k3 + m, j3 + 2 * m}; }
    void validate() const;
    std::string str() const;
    bool operator==(const BlockTriple&) const = default;
};

enum class Sidedness { one_sided, two_sided };
enum class CaseLabel { i, ii, iii, zero };

std::string to_string(CaseLabel c);

struct CasePrediction {
    bool feasible = false;
    CaseLabel label = CaseLabel::zero;
    double predicted = 0.0;
};

bool frequency_constraint_holds(const BlockTriple& t);   // |k_max - k_med| <= 3
bool modulation_constraint_holds(const BlockTriple& t);  // j_max >= k_max + k_min - 10
CasePrediction classify(const BlockTriple& t);

// Lattice steps: xi = n h, sigma = m delta. For a triple, h = 2^{min(k_min, j_min/2)}/density
// and delta = 2^{j_min}/density, so the xi step also resolves the curvature of the thinnest block.
struct BlockLattice {
    double h = 0.0;
    double delta = 0.0;

    static BlockLattice for_triple(const BlockTriple& t, double density);
    static BlockLattice for_block(int k, int j, double density);
    double cell() const { return h * delta; }
};

// Modulation shell I_j: |sigma| <= 2 for j = 0, 2^{j-1} <= |sigma| <= 2^{j+1} otherwise.
bool in_modulation_shell(double sigma, int j);
bool in_frequency_shell(double xi, int k, Sidedness side);

// (xi, tau) in D_{k,j} (tau + xi^2 in I_j) or, reflected, (-xi, -tau) in D_{k,j}.
bool in_block(int k, int j, double xi, double tau, bool reflected = false, Sidedness side = Sidedness::one_sided);

struct LatticePoint {
    long n = 0;        // xi index
    long m = 0;        // modulation index
    double xi = 0.0;
    double sigma = 0.0;  // tau + xi^2, or tau - xi^2 when reflected
    double tau = 0.0;
};

// Every lattice point of the block; throws ContractViolation when none exists.
std::vector<LatticePoint> block_region(int k, int j, const BlockLattice& lattice, bool reflected = false,
                                       Sidedness side = Sidedness::one_sided);

// Integer index ranges for the frequency and modulation parts of a block.
struct IndexInterval {
    long lo = 0;
    long hi = -1;
    bool empty() const { return hi < lo; }
    long size() const { return empty() ? 0 : hi - lo + 1; }
};
std::vector<IndexInterval> frequency_indices(int k, double h, Sidedness side, bool reflected);
std::vector<IndexInterval> modulation_indices(int j, double delta);

// Output modulation minus input modulations for the product u * v with u at (xi1, tau1)
// and v at (xi2, tau2) (v-modulation tau2 - xi2^2). Equals 2 xi xi2 with xi = xi1 + xi2.
double resonance(double xi1, double tau1, double xi2, double tau2);

// 2 xi xi2 on the lattice, rounded to the modulation step.
long resonance_shift(long n_out, long n_v, const BlockLattice& lattice);

}  // namespace qslab

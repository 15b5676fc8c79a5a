#include "qslab/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qslab/error.hpp"

namespace qslab {

namespace {

constexpr double kEdge = 1e-9;
constexpr int kSimilar = 3;

double pow2(double e) { return std::exp2(e); }

bool similar(int a, int b) { return std::abs(a - b) <= kSimilar; }
bool much_larger(int a, int b) { return a - b > kSimilar; }

long ceil_index(double v) { return static_cast<long>(std::ceil(v - kEdge)); }
long floor_index(double v) { return static_cast<long>(std::floor(v + kEdge)); }

}  // namespace

void BlockTriple::validate() const {
    if (j1 < 0 || j2 < 0 || j3 < 0) throw ContractViolation("block triple " + str() + " has a negative modulation index");
}

std::string BlockTriple::str() const {
    std::ostringstream os;
    os << "k=(" << k1 << "," << k2 << "," << k3 << ") j=(" << j1 << "," << j2 << "," << j3 << ")";
    return os.str();
}

std::string to_string(CaseLabel c) {
    switch (c) {
        case CaseLabel::i: return "i";
        case CaseLabel::ii: return "ii";
        case CaseLabel::iii: return "iii";
        case CaseLabel::zero: return "zero";
    }
    return "?";
}

bool frequency_constraint_holds(const BlockTriple& t) {
    auto k = t.ks();
    std::sort(k.begin(), k.end());
    return k[2] - k[1] <= 3;
}

bool modulation_constraint_holds(const BlockTriple& t) {
    const auto k = t.ks();
    const auto j = t.js();
    const int kmax = *std::max_element(k.begin(), k.end());
    const int kmin = *std::min_element(k.begin(), k.end());
    return *std::max_element(j.begin(), j.end()) >= kmax + kmin - 10;
}

CasePrediction classify(const BlockTriple& t) {
    t.validate();
    CasePrediction out;
    if (!frequency_constraint_holds(t) || !modulation_constraint_holds(t)) return out;
    out.feasible = true;

    auto k = t.ks();
    auto j = t.js();
    std::sort(k.begin(), k.end());
    std::sort(j.begin(), j.end());
    const int kmin = k[0], kmax = k[2];
    const int jmin = j[0], jmed = j[1], jmax = j[2];
    const int nn = kmax + kmin;

    if (similar(kmax, kmin) && similar(jmax, nn)) {
        out.label = CaseLabel::i;
        out.predicted = pow2(0.5 * jmin + 0.25 * jmed);
        return out;
    }
    const bool ii_a = similar(t.k1, t.k3) && much_larger(std::min(t.k1, t.k3), t.k2) && t.j2 == jmax && similar(jmax, nn);
    const bool ii_b = similar(t.k1, t.k2) && much_larger(std::min(t.k1, t.k2), t.k3) && t.j3 == jmax && similar(jmax, nn);
    if (ii_a || ii_b) {
        out.label = CaseLabel::ii;
        out.predicted = pow2(0.5 * jmin + 0.5 * jmed - 0.5 * kmin);
        return out;
    }
    out.label = CaseLabel::iii;
    out.predicted = pow2(0.5 * jmin - 0.5 * kmax + 0.5 * std::min(nn, jmed));
    return out;
}

BlockLattice BlockLattice::for_triple(const BlockTriple& t, double density) {
    if (!(density > 0.0)) throw ContractViolation("lattice density must be positive");
    const auto k = t.ks();
    const auto j = t.js();
    const int kmin = *std::min_element(k.begin(), k.end());
    const int jmin = *std::min_element(j.begin(), j.end());
    return {std::exp2(std::min(double(kmin), 0.5 * jmin)) / density, std::ldexp(1.0, jmin) / density};
}

BlockLattice BlockLattice::for_block(int k, int j, double density) {
    if (!(density > 0.0)) throw ContractViolation("lattice density must be positive");
    return {std::ldexp(1.0, k) / density, std::ldexp(1.0, j) / density};
}

bool in_modulation_shell(double sigma, int j) {
    const double a = std::abs(sigma);
    if (j == 0) return a <= 2.0 * (1 + kEdge);
    return a >= std::ldexp(1.0, j - 1) * (1 - kEdge) && a <= std::ldexp(1.0, j + 1) * (1 + kEdge);
}

bool in_frequency_shell(double xi, int k, Sidedness side) {
    if (side == Sidedness::one_sided && xi < 0.0) return false;
    const double a = std::abs(xi);
    return a >= std::ldexp(1.0, k - 1) * (1 - kEdge) && a <= std::ldexp(1.0, k + 1) * (1 + kEdge);
}

bool in_block(int k, int j, double xi, double tau, bool reflected, Sidedness side) {
    if (reflected) {
        xi = -xi;
        tau = -tau;
    }
    return in_frequency_shell(xi, k, side) && in_modulation_shell(tau + xi * xi, j);
}

std::vector<IndexInterval> frequency_indices(int k, double h, Sidedness side, bool reflected) {
    const IndexInterval pos{ceil_index(std::ldexp(1.0, k - 1) / h), floor_index(std::ldexp(1.0, k + 1) / h)};
    const IndexInterval neg{-pos.hi, -pos.lo};
    if (side == Sidedness::two_sided) return {neg, pos};
    return {reflected ? neg : pos};
}

std::vector<IndexInterval> modulation_indices(int j, double delta) {
    if (j == 0) {
        const long r = floor_index(2.0 / delta);
        return {{-r, r}};
    }
    const IndexInterval pos{ceil_index(std::ldexp(1.0, j - 1) / delta), floor_index(std::ldexp(1.0, j + 1) / delta)};
    return {{-pos.hi, -pos.lo}, pos};
}

std::vector<LatticePoint> block_region(int k, int j, const BlockLattice& lattice, bool reflected, Sidedness side) {
    if (j < 0) throw ContractViolation("block_region: modulation index must be >= 0");
    if (!(lattice.h > 0.0 && lattice.delta > 0.0)) throw ContractViolation("block_region: lattice steps must be positive");
    std::vector<LatticePoint> pts;
    for (const auto& fi : frequency_indices(k, lattice.h, side, reflected))
        for (long n = fi.lo; n <= fi.hi; ++n)
            for (const auto& mi : modulation_indices(j, lattice.delta))
                for (long m = mi.lo; m <= mi.hi; ++m) {
                    LatticePoint p;
                    p.n = n;
                    p.m = m;
                    p.xi = n * lattice.h;
                    p.sigma = m * lattice.delta;
                    p.tau = reflected ? p.sigma + p.xi * p.xi : p.sigma - p.xi * p.xi;
                    pts.push_back(p);
                }
    if (pts.empty()) {
        std::ostringstream os;
        os << "block (k=" << k << ", j=" << j << ") has no lattice points at steps h=" << lattice.h
           << ", delta=" << lattice.delta << "; use a finer density";
        throw ContractViolation(os.str());
    }
    return pts;
}

double resonance(double xi1, double tau1, double xi2, double tau2) {
    const double xi = xi1 + xi2;
    const double tau = tau1 + tau2;
    return (tau + xi * xi) - (tau1 + xi1 * xi1) - (tau2 - xi2 * xi2);
}

long resonance_shift(long n_out, long n_v, const BlockLattice& lattice) {
    const double q = 2.0 * lattice.h * lattice.h / lattice.delta;
    return std::llround(q * static_cast<double>(n_out) * static_cast<double>(n_v));
}

}  // namespace qslab

#include "qslab/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qslab/error.hpp"
#include "fourier.hpp"

namespace qslab {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

PhaseGrid PhaseGrid::make(int nx, int nt, double xlen, double tlen) {
    PhaseGrid g{nx, nt, xlen, tlen};
    g.validate();
    return g;
}

PhaseGrid PhaseGrid::spatial(int nx, double xlen) { return make(nx, 1, xlen, 1.0); }

void PhaseGrid::validate() const {
    if (!power_of_two(nx) || nx < 8)
        throw ContractViolation("grid nx must be a power of two >= 8, got " + std::to_string(nx));
    if (!power_of_two(nt) || (nt != 1 && nt < 8))
        throw ContractViolation("grid nt must be 1 or a power of two >= 8, got " + std::to_string(nt));
    if (!(xlen > 0.0) || !(tlen > 0.0) || !std::isfinite(xlen) || !std::isfinite(tlen))
        throw ContractViolation("grid lengths must be positive and finite");
}

double PhaseGrid::dxi() const { return 2.0 * std::numbers::pi / xlen; }
double PhaseGrid::dtau() const { return 2.0 * std::numbers::pi / tlen; }
double PhaseGrid::xi_nyquist() const { return std::numbers::pi * nx / xlen; }
double PhaseGrid::tau_nyquist() const { return std::numbers::pi * nt / tlen; }

int PhaseGrid::k_grid() const {
    // eta_k is supported in |xi| <= 1.6 * 2^k; keep that inside the lattice.
    return static_cast<int>(std::floor(std::log2(xi_nyquist()))) - 1;
}

Field::Field(const PhaseGrid& grid, Domain domain, std::vector<cplx> values)
    : grid_(grid), domain_(domain), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != grid_.size())
        throw ContractViolation("field size " + std::to_string(values_.size()) + " does not match grid " +
                                std::to_string(grid_.size()));
}

Field Field::zeros(const PhaseGrid& grid, Domain domain) {
    return Field(grid, domain, std::vector<cplx>(grid.size()));
}

InitialData::InitialData(const PhaseGrid& grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != static_cast<std::size_t>(grid_.nx))
        throw ContractViolation("initial data needs nx samples");
}

InitialData InitialData::from_spectrum(const PhaseGrid& grid, std::span<const cplx> spectrum) {
    if (spectrum.size() != static_cast<std::size_t>(grid.nx))
        throw ContractViolation("spectrum needs nx samples");
    std::vector<cplx> v(spectrum.begin(), spectrum.end());
    fourier::centered_axis(v.data(), grid.nx, 1, 1, grid.nx, grid.dx(), fourier::Direction::inverse);
    return InitialData(grid, std::move(v));
}

std::vector<cplx> InitialData::spectrum() const {
    std::vector<cplx> v = values_;
    fourier::centered_axis(v.data(), grid_.nx, 1, 1, grid_.nx, grid_.dx(), fourier::Direction::forward);
    return v;
}

ModField::ModField(const PhaseGrid& grid, std::vector<cplx> values, std::vector<double> shift)
    : grid_(grid), values_(std::move(values)), shift_(std::move(shift)) {
    grid_.validate();
    if (values_.size() != grid_.size()) throw ContractViolation("modulation spectrum size does not match grid");
    if (!shift_.empty() && shift_.size() != static_cast<std::size_t>(grid_.nx))
        throw ContractViolation("modulation shift needs nx entries");
}

}  // namespace qslab

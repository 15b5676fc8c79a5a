#pragma once

#include <span>

namespace qslab::lp {

// Even bump: 1 on |x| <= inner_plateau, 0 on |x| >= outer_support, C-infinity between.
struct CutoffProfile {
    double inner_plateau = 1.25;
    double outer_support = 1.6;
    double transition_sharpness = 1.0;

    double operator()(double x) const;
    void validate() const;
};

double eta0(double x, const CutoffProfile& p = {});

// eta_k(x) = eta0(x/2^k) - eta0(x/2^{k-1}) for k >= 1, eta0 for k = 0, 0 for k < 0.
double eta(double x, int k, const CutoffProfile& p = {});

// Time cutoff.
inline double psi(double t, const CutoffProfile& p = {}) { return eta0(t, p); }

// Sum of eta_k over k <= l (eta0(x/2^l) for l >= 0).
double eta_low(double x, int l, const CutoffProfile& p = {});

// max over samples of |sum_{k=0}^{k_max} eta_k(x) - eta0(x / 2^{k_max})|.
double partition_defect(std::span<const double> samples, int k_max, const CutoffProfile& p = {});

}  // namespace qslab::lp

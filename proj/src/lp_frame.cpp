#include "qslab/lp_frame.hpp"

#include <algorithm>
#include <cmath>

#include "qslab/error.hpp"

namespace qslab::lp {

namespace {

double smooth_step(double y, double a) {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    const double f = std::exp(-a / y);
    const double g = std::exp(-a / (1.0 - y));
    return f / (f + g);
}

}  // namespace

void CutoffProfile::validate() const {
    if (!(inner_plateau > 0.0 && outer_support > inner_plateau))
        throw ContractViolation("cutoff profile needs 0 < inner_plateau < outer_support");
    if (!(transition_sharpness > 0.0))
        throw ContractViolation("cutoff transition_sharpness must be positive");
}

double CutoffProfile::operator()(double x) const {
    const double ax = std::abs(x);
    if (ax <= inner_plateau) return 1.0;
    if (ax >= outer_support) return 0.0;
    return smooth_step((outer_support - ax) / (outer_support - inner_plateau), transition_sharpness);
}

double eta0(double x, const CutoffProfile& p) { return p(x); }

double eta(double x, int k, const CutoffProfile& p) {
    if (k < 0) return 0.0;
    if (k == 0) return p(x);
    return p(std::ldexp(x, -k)) - p(std::ldexp(x, -(k - 1)));
}

double eta_low(double x, int l, const CutoffProfile& p) {
    if (l < 0) return 0.0;
    return p(std::ldexp(x, -l));
}

double partition_defect(std::span<const double> samples, int k_max, const CutoffProfile& p) {
    if (k_max < 1) throw ContractViolation("partition_defect: k_max must be >= 1");
    double worst = 0.0;
    for (double x : samples) {
        double sum = 0.0;
        for (int k = 0; k <= k_max; ++k) sum += eta(x, k, p);
        worst = std::max(worst, std::abs(sum - eta_low(x, k_max, p)));
    }
    return worst;
}

}  // namespace qslab::lp

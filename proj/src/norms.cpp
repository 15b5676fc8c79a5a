#include "qslab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fourier.hpp"
#include "qslab/error.hpp"
#include "qslab/spacetime.hpp"

namespace qslab {

namespace {

double max_abs_sigma(const ModField& f) {
    const PhaseGrid& g = f.grid();
    double hi = 0.0;
    for (int i = 0; i < g.nx; ++i)
        hi = std::max({hi, std::abs(f.sigma(i, 0)), std::abs(f.sigma(i, g.nt - 1))});
    return hi;
}

// Highest modulation shell whose multiplier reaches the lattice.
int reach_j(double max_sigma) {
    int j = 0;
    while (0.625 * std::ldexp(1.0, j + 1) < max_sigma) ++j;
    return j;
}

struct ShellEnergies {
    int j_top = 0;
    std::vector<double> energy;  // per j, sum of weight(xi) eta_j(sigma)^2 |g|^2 dxi dtau
};

template <class RowWeight>
ShellEnergies modulation_energies(const ModField& f, RowWeight&& row_weight, const lp::CutoffProfile& p) {
    const PhaseGrid& g = f.grid();
    ShellEnergies out;
    out.j_top = reach_j(max_abs_sigma(f));
    out.energy.assign(out.j_top + 1, 0.0);
    std::vector<double> w(out.j_top + 1);
    const double cell = g.dxi() * g.dtau();
    for (int i = 0; i < g.nx; ++i) {
        const double rw = row_weight(i);
        if (rw == 0.0) continue;
        std::fill(w.begin(), w.end(), 0.0);
        for (int m = 0; m < g.nt; ++m) {
            const double a = std::norm(f.at(i, m));
            if (a == 0.0) continue;
            const double sg = f.sigma(i, m);
            const double asg = std::abs(sg);
            // eta_j(sigma) is nonzero only for j within one of log2|sigma|.
            const int jc = asg <= 1.0 ? 0 : static_cast<int>(std::floor(std::log2(asg)));
            for (int j = std::max(0, jc - 1); j <= std::min(out.j_top, jc + 2); ++j) {
                const double e = lp::eta(sg, j, p);
                if (e != 0.0) w[j] += e * e * a;
            }
        }
        for (int j = 0; j <= out.j_top; ++j) out.energy[j] += rw * w[j] * cell;
    }
    return out;
}

double xk_from_energies(const ShellEnergies& e, int j_max, std::vector<ShellContribution>* shells, int k,
                        double* tail) {
    double total = 0.0, rest = 0.0;
    for (int j = 0; j <= e.j_top; ++j) {
        const double v = std::pow(2.0, 0.5 * j) * std::sqrt(e.energy[j]);
        if (j <= j_max) {
            total += v;
            if (shells) shells->push_back({k, j, v});
        } else {
            rest += v;
        }
    }
    if (tail) *tail = rest;
    return total;
}

double shell_low(int k) { return k == 0 ? 0.0 : std::ldexp(1.0, k - 1); }
double shell_high(int k) { return std::ldexp(1.0, k + 1); }

int top_frequency_shell(const PhaseGrid& g) {
    int k = 0;
    while (1.25 * std::ldexp(1.0, k) < g.xi_nyquist()) ++k;
    return k;
}

}  // namespace

std::string to_string(NormSpace s) {
    switch (s) {
        case NormSpace::xk: return "xk";
        case NormSpace::fbar: return "fbar";
        case NormSpace::hs: return "hs";
        case NormSpace::linf_l2: return "linf_l2";
        case NormSpace::l1_l2: return "l1_l2";
    }
    return "?";
}

NormSpace norm_space_from_string(const std::string& s) {
    if (s == "xk") return NormSpace::xk;
    if (s == "fbar") return NormSpace::fbar;
    if (s == "hs") return NormSpace::hs;
    if (s == "linf_l2" || s == "linfl2") return NormSpace::linf_l2;
    if (s == "l1_l2" || s == "l1l2") return NormSpace::l1_l2;
    throw ContractViolation("unknown norm space '" + s + "'");
}

nlohmann::json NormBreakdown::to_json() const {
    nlohmann::json j;
    j["space"] = to_string(space);
    j["s"] = s;
    if (space == NormSpace::xk) {
        j["k"] = k;
        j["j_max"] = j_max;
        j["tail"] = tail;
    }
    j["total"] = total;
    j["combine"] = space == NormSpace::fbar ? "l2" : "sum";
    auto& arr = j["shells"] = nlohmann::json::array();
    for (const auto& c : shells) {
        nlohmann::json e{{"k", c.k}, {"value", c.value}};
        if (c.j) e["j"] = *c.j;
        arr.push_back(e);
    }
    return j;
}

int default_j_max(const ModField& f) {
    const double hi = max_abs_sigma(f);
    return hi < 1.0 ? 0 : static_cast<int>(std::floor(std::log2(hi)));
}

NormBreakdown xk_norm(const ModField& f, int k, std::optional<int> j_max, const lp::CutoffProfile& p) {
    if (k < 0) throw ContractViolation("xk_norm: shell index must be >= 0");
    const PhaseGrid& g = f.grid();
    const double lo = shell_low(k), hi = shell_high(k);
    double inside = 0.0, outside = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double a = std::abs(g.xi(i));
        double row = 0.0;
        for (int m = 0; m < g.nt; ++m) row += std::norm(f.at(i, m));
        ((a >= lo && a <= hi) ? inside : outside) += row;
    }
    if (inside + outside > 0.0 && outside > kSupportTolerance * (inside + outside)) {
        std::ostringstream os;
        os << "xk_norm: field is not supported in shell " << k << " (mass fraction " << outside / (inside + outside)
           << " outside)";
        throw ContractViolation(os.str());
    }
    NormBreakdown b;
    b.space = NormSpace::xk;
    b.k = k;
    b.j_max = j_max.value_or(default_j_max(f));
    const auto e = modulation_energies(
        f, [&](int i) { return std::abs(g.xi(i)) >= lo && std::abs(g.xi(i)) <= hi ? 1.0 : 0.0; }, p);
    b.total = xk_from_energies(e, b.j_max, &b.shells, k, &b.tail);
    if (b.tail > kTailTolerance * (b.total + b.tail)) {
        std::ostringstream os;
        os << "xk_norm: modulation tail beyond j_max = " << b.j_max << " is " << b.tail / (b.total + b.tail)
           << " of the total";
        throw ContractViolation(os.str());
    }
    return b;
}

NormBreakdown xk_norm(const Field& f, int k, std::optional<int> j_max, const lp::CutoffProfile& p) {
    return xk_norm(modulation_view(f), k, j_max, p);
}

NormBreakdown fbar_norm(const ModField& comoving, double s, const lp::CutoffProfile& p) {
    if (!comoving.comoving()) throw ContractViolation("fbar_norm needs a co-moving spectrum");
    if (!(s >= -0.75 && s <= 0.0)) throw ContractViolation("fbar_norm: s = " + std::to_string(s) + " is outside [-3/4, 0]");
    const PhaseGrid& g = comoving.grid();
    NormBreakdown b;
    b.space = NormSpace::fbar;
    b.s = s;
    double sq = 0.0;

    // Low part through the co-moving profile: |w| = |u^| pointwise in (xi, t).
    std::vector<cplx> w(comoving.values().begin(), comoving.values().end());
    fourier::along_t(w.data(), g, fourier::Direction::inverse);
    double low = 0.0;
    for (int m = 0; m < g.nt; ++m) {
        double acc = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const double e = lp::eta0(g.xi(i), p);
            if (e != 0.0) acc += e * e * std::norm(w[static_cast<std::size_t>(i) * g.nt + m]);
        }
        low = std::max(low, acc * g.dxi());
    }
    low = std::sqrt(low);
    b.shells.push_back({0, std::nullopt, low});
    sq += low * low;

    int j_max = 0;
    for (int k = 1; k <= top_frequency_shell(g); ++k) {
        const auto e = modulation_energies(
            comoving, [&](int i) { const double v = lp::eta(g.xi(i), k, p); return v * v; }, p);
        j_max = std::max(j_max, e.j_top);
        const double xk = xk_from_energies(e, e.j_top, nullptr, k, nullptr);
        const double v = std::pow(2.0, s * k) * xk;
        b.shells.push_back({k, std::nullopt, v});
        sq += v * v;
    }
    b.j_max = j_max;
    b.total = std::sqrt(sq);
    return b;
}

NormBreakdown fbar_norm(const Field& u, double s, const lp::CutoffProfile& p) {
    if (u.domain() == Domain::spectral) return fbar_norm(to_modulation(to_physical(u)), s, p);
    return fbar_norm(to_modulation(u), s, p);
}

double hs_norm(const InitialData& phi, double s) {
    const PhaseGrid& g = phi.grid();
    const auto spec = phi.spectrum();
    double acc = 0.0;
    for (int i = 0; i < g.nx; ++i) acc += std::pow(1.0 + g.xi(i) * g.xi(i), s) * std::norm(spec[i]);
    return std::sqrt(acc * g.dxi());
}

double linf_l2(const Field& physical) {
    if (physical.domain() != Domain::physical) return linf_l2(to_physical(physical));
    const PhaseGrid& g = physical.grid();
    double hi = 0.0;
    for (int m = 0; m < g.nt; ++m) {
        double acc = 0.0;
        for (int i = 0; i < g.nx; ++i) acc += std::norm(physical.at(i, m));
        hi = std::max(hi, acc);
    }
    return std::sqrt(hi * g.dx());
}

double linf_l2(const ModField& comoving) {
    if (!comoving.comoving()) throw ContractViolation("linf_l2 needs a co-moving spectrum");
    const PhaseGrid& g = comoving.grid();
    std::vector<cplx> w(comoving.values().begin(), comoving.values().end());
    fourier::along_t(w.data(), g, fourier::Direction::inverse);
    double hi = 0.0;
    for (int m = 0; m < g.nt; ++m) {
        double acc = 0.0;
        for (int i = 0; i < g.nx; ++i) acc += std::norm(w[static_cast<std::size_t>(i) * g.nt + m]);
        hi = std::max(hi, acc);
    }
    return std::sqrt(hi * g.dxi());
}

double l1tau_l2xi(const Field& spectral) {
    if (spectral.domain() != Domain::spectral) throw ContractViolation("l1tau_l2xi needs a spectral field");
    const PhaseGrid& g = spectral.grid();
    double acc = 0.0;
    for (int m = 0; m < g.nt; ++m) {
        double col = 0.0;
        for (int i = 0; i < g.nx; ++i) col += std::norm(spectral.at(i, m));
        acc += std::sqrt(col * g.dxi());
    }
    return acc * g.dtau();
}

double l1sigma_l2xi(const ModField& f) {
    if (!f.comoving()) throw ContractViolation("l1sigma_l2xi needs a co-moving spectrum");
    const PhaseGrid& g = f.grid();
    double acc = 0.0;
    for (int m = 0; m < g.nt; ++m) {
        double col = 0.0;
        for (int i = 0; i < g.nx; ++i) col += std::norm(f.at(i, m));
        acc += std::sqrt(col * g.dxi());
    }
    return acc * g.dtau();
}

}  // namespace qslab

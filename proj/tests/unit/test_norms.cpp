#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qslab/error.hpp"
#include "qslab/grid.hpp"
#include "qslab/lp_frame.hpp"
#include "qslab/norms.hpp"
#include "qslab/spacetime.hpp"

using namespace qslab;
using std::numbers::pi;

namespace {

// Co-moving spectrum filled by `value(xi, sigma)`.
template <class F>
ModField comoving_from(const PhaseGrid& g, F&& value) {
    std::vector<cplx> v(g.size());
    for (int i = 0; i < g.nx; ++i)
        for (int m = 0; m < g.nt; ++m) v[static_cast<std::size_t>(i) * g.nt + m] = value(g.xi(i), g.tau(m));
    return ModField(g, std::move(v));
}

ModField normalized(const ModField& f) {
    const PhaseGrid& g = f.grid();
    double acc = 0.0;
    for (const cplx& z : f.values()) acc += std::norm(z);
    const double n = std::sqrt(acc * g.dxi() * g.dtau());
    std::vector<cplx> v(f.values().begin(), f.values().end());
    for (auto& z : v) z /= n;
    return ModField(g, std::move(v));
}

ModField scaled(const ModField& f, cplx a) {
    std::vector<cplx> v(f.values().begin(), f.values().end());
    for (auto& z : v) z *= a;
    return ModField(f.grid(), std::move(v));
}

bool in_shell(double xi, int k) {
    const double a = std::abs(xi);
    return a >= (k == 0 ? 0.0 : std::ldexp(1.0, k - 1)) && a <= std::ldexp(1.0, k + 1);
}

InitialData random_band(const PhaseGrid& g, int k_top, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    std::vector<cplx> s(g.nx);
    for (int i = 0; i < g.nx; ++i) s[i] = lp::eta_low(g.xi(i), k_top) * cplx(n01(rng), n01(rng));
    return InitialData::from_spectrum(g, s);
}

// Larger than any modulation shell a test lattice reaches.
constexpr int kAllShells = 40;

}  // namespace

TEST_CASE("X_k of a unit block on the lowest modulation shell") {
    const PhaseGrid g = PhaseGrid::make(256, 256, 32.0 * pi, 64.0);
    const int k = 2;
    const ModField f = normalized(comoving_from(g, [&](double xi, double s) {
        return in_shell(xi, k) && std::abs(s) <= 1.0 ? cplx(1.0) : cplx(0.0);
    }));
    const NormBreakdown b = xk_norm(f, k);
    CHECK(b.total == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("X_k of mass on the plateau of eta_4") {
    const PhaseGrid g = PhaseGrid::make(256, 512, 32.0 * pi, 64.0);
    const int k = 2;
    const ModField f = normalized(comoving_from(g, [&](double xi, double s) {
        return in_shell(xi, k) && std::abs(s) >= 12.8 && std::abs(s) <= 20.0 ? cplx(1.0) : cplx(0.0);
    }));
    const NormBreakdown b = xk_norm(f, k);
    CHECK(b.total >= 4.0 * (1.0 - 1e-12));
    CHECK(b.total <= 6.0);
}

TEST_CASE("X_k breakdown aggregates, tail and support errors") {
    const PhaseGrid g = PhaseGrid::make(128, 256, 16.0 * pi, 32.0);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n01;
    const int k = 1;
    const ModField f = comoving_from(g, [&](double xi, double s) {
        return in_shell(xi, k) && std::abs(s) < 20.0 ? cplx(n01(rng), n01(rng)) : cplx(0.0);
    });
    const NormBreakdown b = xk_norm(f, k);
    double sum = 0.0;
    for (const auto& c : b.shells) {
        CHECK(c.value >= 0.0);
        CHECK(c.k == k);
        sum += c.value;
    }
    CHECK(sum == doctest::Approx(b.total).epsilon(1e-14));
    const auto j = b.to_json();
    CHECK(j["space"] == "xk");
    CHECK(j["shells"].size() == b.shells.size());
    CHECK(j.contains("total"));

    CHECK_THROWS_AS(xk_norm(f, k, 2), ContractViolation);
    CHECK_THROWS_WITH_AS(xk_norm(f, 3), doctest::Contains("mass fraction"), ContractViolation);
}

TEST_CASE("X_k of windowed free waves is uniform in the shell") {
    const PhaseGrid g = PhaseGrid::make(4096, 256, 64.0 * pi, 16.0);
    std::vector<double> ratios;
    for (int k = 2; k <= g.k_grid(); ++k) {
        const InitialData phi = project(random_band(PhaseGrid::spatial(g.nx, g.xlen), k + 1, 10 + k), k);
        const NormBreakdown b = xk_norm(project(windowed_free_wave(phi, g), k), k, kAllShells);
        ratios.push_back(b.total / l2_norm(phi));
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    CHECK(*hi <= 1.01 * *lo);
}

TEST_CASE("F-bar of low-frequency and single-shell content") {
    const PhaseGrid g = PhaseGrid::make(256, 256, 32.0 * pi, 16.0);
    const PhaseGrid sg = PhaseGrid::spatial(g.nx, g.xlen);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n01;
    std::vector<cplx> ls(g.nx, 0.0);
    for (int i = 0; i < g.nx; ++i)
        if (std::abs(g.xi(i)) < 0.6) ls[i] = cplx(n01(rng), n01(rng));
    const InitialData low = InitialData::from_spectrum(sg, ls);
    const Field ul = windowed_free_wave(low, g);
    const NormBreakdown bl = fbar_norm(ul, -0.25);
    CHECK(bl.total == doctest::Approx(linf_l2(project_low(ul, 0))).epsilon(1e-10));

    // eta_2 = 1 on 3.2 <= |xi| <= 5, so a field supported there only meets shell 2.
    std::vector<cplx> sp(g.nx, 0.0);
    for (int i = 0; i < g.nx; ++i)
        if (std::abs(g.xi(i)) > 3.3 && std::abs(g.xi(i)) < 4.9) sp[i] = std::exp(-g.xi(i));
    const Field u2 = windowed_free_wave(InitialData::from_spectrum(sg, sp), g);
    const double s = -0.25;
    const NormBreakdown b2 = fbar_norm(u2, s);
    CHECK(b2.total == doctest::Approx(std::pow(2.0, 2 * s) * xk_norm(u2, 2, kAllShells).total).epsilon(1e-8));

    CHECK_THROWS_AS(fbar_norm(u2, 0.1), ContractViolation);
    CHECK_THROWS_AS(fbar_norm(u2, -0.8), ContractViolation);

    double sq = 0.0;
    for (const auto& c : b2.shells) {
        CHECK(c.value >= 0.0);
        sq += c.value * c.value;
    }
    CHECK(std::sqrt(sq) == doctest::Approx(b2.total).epsilon(1e-14));
    CHECK(b2.to_json()["combine"] == "l2");
}

TEST_CASE("L-infinity H^s is controlled by F-bar uniformly") {
    const PhaseGrid g = PhaseGrid::make(512, 256, 64.0 * pi, 16.0);
    const PhaseGrid sg = PhaseGrid::spatial(g.nx, g.xlen);
    const double s = -0.25;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n01;
    double worst = 0.0;
    for (int draw = 0; draw < 12; ++draw) {
        // Random band-limited field with random modulation content.
        std::vector<cplx> v(g.size(), 0.0);
        const int ktop = draw % g.k_grid() + 1;
        for (int i = 0; i < g.nx; ++i) {
            const double e = lp::eta_low(g.xi(i), ktop);
            if (e == 0.0) continue;
            for (int m = 0; m < g.nt; ++m)
                if (std::abs(g.tau(m)) < 8.0) v[static_cast<std::size_t>(i) * g.nt + m] = e * cplx(n01(rng), n01(rng));
        }
        const Field u = from_modulation(ModField(g, v));
        const std::vector<cplx> w = comoving_profile(u);
        double sup = 0.0;
        for (int m = 0; m < g.nt; ++m) {
            double acc = 0.0;
            for (int i = 0; i < g.nx; ++i)
                acc += std::pow(1.0 + g.xi(i) * g.xi(i), s) * std::norm(w[static_cast<std::size_t>(i) * g.nt + m]);
            sup = std::max(sup, acc * g.dxi());
        }
        worst = std::max(worst, std::sqrt(sup) / fbar_norm(u, s).total);
    }
    (void)sg;
    MESSAGE("max L-inf H^s / F-bar ratio: " << worst);
    CHECK(worst <= 1.5);
}

TEST_CASE("H^s norm") {
    const PhaseGrid g = PhaseGrid::spatial(2048, 1024.0 * pi);
    std::vector<cplx> sp(g.nx, 0.0);
    for (int i = 0; i < g.nx; ++i)
        if (g.xi(i) >= 0.0 && g.xi(i) < 1.0 - 1e-12) sp[i] = 1.0;
    const InitialData phi = InitialData::from_spectrum(g, sp);
    CHECK(hs_norm(phi, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    // Composite Simpson for int_0^1 (1 + xi^2)^{-1/4} dxi.
    const int n = 2000;
    double q = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = double(i) / n;
        q += (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0)) * std::pow(1.0 + x * x, -0.25);
    }
    q /= 3.0 * n;
    CHECK(hs_norm(phi, -0.25) == doctest::Approx(std::sqrt(q)).epsilon(1e-3));
    CHECK(hs_norm(phi, -0.25) < 1.0);
    CHECK(hs_norm(InitialData(g, std::vector<cplx>(g.nx, 0.0)), -0.25) == 0.0);
}

TEST_CASE("L1_tau L2_xi norm") {
    const PhaseGrid g = PhaseGrid::make(64, 64, 16.0 * pi, 32.0);
    std::vector<cplx> v(g.size(), 0.0);
    v[static_cast<std::size_t>(40) * g.nt + 20] = 3.0;
    CHECK(l1tau_l2xi(Field(g, Domain::spectral, v)) == doctest::Approx(g.dtau() * std::sqrt(g.dxi()) * 3.0));

    // Equal mass spread over M modulation rows grows like sqrt(M).
    auto spread = [&](int M) {
        std::vector<cplx> w(g.size(), 0.0);
        for (int r = 0; r < M; ++r) w[static_cast<std::size_t>(40) * g.nt + 10 + r] = 1.0 / std::sqrt(double(M));
        return l1tau_l2xi(Field(g, Domain::spectral, w));
    };
    CHECK(spread(16) / spread(1) == doctest::Approx(4.0));

    // Shell-supported f: L1 L2 <= (1 + 10%) X_k.
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 5; ++trial) {
        const int k = 1 + trial % 2;
        std::vector<cplx> f(g.size(), 0.0);
        for (int i = 0; i < g.nx; ++i) {
            if (!in_shell(g.xi(i), k)) continue;
            for (int m = 0; m < g.nt; ++m) {
                const double sig = g.tau(m) + g.xi(i) * g.xi(i);
                if (std::abs(sig) < 16.0) f[static_cast<std::size_t>(i) * g.nt + m] = cplx(n01(rng), n01(rng));
            }
        }
        const Field sf(g, Domain::spectral, f);
        CHECK(l1tau_l2xi(sf) <= 1.1 * xk_norm(sf, k).total);
    }
    CHECK_THROWS_AS(l1tau_l2xi(Field(g, Domain::physical, v)), ContractViolation);
}

TEST_CASE("homogeneity and monotonicity") {
    const PhaseGrid g = PhaseGrid::make(256, 256, 32.0 * pi, 16.0);
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n01;
    const int k = 2;
    const ModField f = comoving_from(g, [&](double xi, double s) {
        return lp::eta(xi, k) * (std::abs(s) < 6.0 ? 1.0 : 0.0) * cplx(n01(rng), n01(rng));
    });
    const cplx lambda(-2.0, 1.5);
    const double a = std::abs(lambda);
    CHECK(xk_norm(scaled(f, lambda), k).total == doctest::Approx(a * xk_norm(f, k).total).epsilon(1e-13));
    CHECK(fbar_norm(scaled(f, lambda), -0.25).total == doctest::Approx(a * fbar_norm(f, -0.25).total).epsilon(1e-13));
    CHECK(linf_l2(scaled(f, lambda)) == doctest::Approx(a * linf_l2(f)).epsilon(1e-13));

    // Disjoint modulation mass added to the same shell.
    const ModField extra = comoving_from(g, [&](double xi, double s) {
        return lp::eta(xi, k) * (std::abs(s) >= 20.0 && std::abs(s) < 40.0 ? 1.0 : 0.0) * cplx(n01(rng), n01(rng));
    });
    std::vector<cplx> sum(f.values().begin(), f.values().end());
    for (std::size_t n = 0; n < sum.size(); ++n) sum[n] += extra.values()[n];
    const ModField both(g, sum);
    CHECK(xk_norm(both, k).total >= xk_norm(f, k).total);
    CHECK(fbar_norm(both, -0.25).total >= fbar_norm(f, -0.25).total);
}

TEST_CASE("norm space names round trip") {
    for (auto s : {NormSpace::xk, NormSpace::fbar, NormSpace::hs, NormSpace::linf_l2, NormSpace::l1_l2})
        CHECK(norm_space_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(norm_space_from_string("h1"), ContractViolation);
}

// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qslab/block_norm.hpp"
#include "qslab/blocks.hpp"
#include "qslab/divergence.hpp"
#include "qslab/error.hpp"
#include "qslab/lp_frame.hpp"
#include "qslab/regions.hpp"
#include "qslab/scan.hpp"
#include "qslab/spacetime.hpp"
#include "qslab/wellposed.hpp"

using namespace qslab;

namespace {

// Pinned tolerances.
constexpr double kPartitionTol = 1e-12;
constexpr double kTransformTol = 1e-12;
constexpr double kResonanceEps = 4.0;  // in units of machine epsilon times the point scale
constexpr double kScanConstant = 2.0;
constexpr double kScanSlope = 0.1;
constexpr double kWitnessFraction = 0.01;
constexpr std::size_t kScanOrbits = 60;
constexpr double kScanWork = 8e6;
constexpr std::size_t kOracleTriples = 50;
constexpr double kOracleTol = 1e-4;
constexpr std::size_t kOraclePoints = 2600;
constexpr double kDivergenceSlopeFraction = 0.5;
constexpr double kDivergenceLowGrowth = 1.2;
constexpr double kEmbeddingSlope = 0.05;
constexpr double kBilinearFactor = 3.0;
constexpr double kBilinearSlope = 0.1;
constexpr double kContraction = 0.5;
constexpr double kPicardResidual = 1e-6;
constexpr double kPicardHalving = 0.01;
constexpr double kTermIIDefect = 1e-3;
constexpr double kDenominatorBound = 0.25;

struct Outcome {
    bool pass = false;
    std::string detail;
    double budget = 0.0;  // seconds, 0 when unbounded
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome frame_suite() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> e(-6.0, 16.0), sgn(-1.0, 1.0);
    std::vector<double> xs(100000);
    for (double& x : xs) x = std::copysign(std::exp2(e(rng)), sgn(rng));
    const double defect = lp::partition_defect(xs, 14);
    bool invariants = true;
    for (int k = 0; k <= 14; ++k)
        for (double x : xs) {
            const double v = lp::eta(x, k);
            if (!(v >= 0.0 && v <= 1.0)) invariants = false;
            const double a = std::abs(x);
            const double lo = k == 0 ? 0.0 : 1.25 * std::ldexp(1.0, k - 1);
            if (v != 0.0 && (a < lo || a > 1.6 * std::ldexp(1.0, k))) invariants = false;
        }
    return {defect <= kPartitionTol && invariants,
            fmt("partition defect %.3g (tol %.0e) over %zu samples, support/range k=0..14 %s", defect, kPartitionTol,
                xs.size(), invariants ? "ok" : "violated"),
            1.0};
}

Outcome transform_suite() {
    const double xlen = 64.0 * std::numbers::pi;
    const PhaseGrid g = PhaseGrid::make(1024, 16, xlen, 8.0);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n01;
    std::vector<cplx> a(g.size());
    for (auto& z : a) z = cplx(n01(rng), n01(rng));
    const Field f(g, Domain::physical, a);
    const Field back = to_physical(to_spectral(f));
    double num = 0.0, den = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        num += std::norm(back.values()[n] - a[n]);
        den += std::norm(a[n]);
    }
    const double round_trip = std::sqrt(num / den);

    const PhaseGrid sg = PhaseGrid::spatial(1024, xlen);
    std::vector<cplx> b(1024);
    for (int i = 0; i < 1024; ++i) b[i] = std::exp(-0.05 * sg.x(i) * sg.x(i)) * cplx(1.0 + n01(rng) * 0.1, n01(rng) * 0.1);
    const InitialData phi(sg, b);
    const double l2 = l2_norm(phi);
    double unitarity = 0.0, group = 0.0;
    for (double t : {0.3, 1.7, 5.0}) {
        unitarity = std::max(unitarity, std::abs(l2_norm(free_evolve_at(phi, t)) - l2) / l2);
        const InitialData ts = free_evolve_at(free_evolve_at(phi, t), 0.45);
        const InitialData direct = free_evolve_at(phi, t + 0.45);
        double d = 0.0;
        for (int i = 0; i < 1024; ++i) d += std::norm(ts.values()[i] - direct.values()[i]);
        group = std::max(group, std::sqrt(d * sg.dx()) / l2);
    }
    const bool ok = round_trip <= kTransformTol && unitarity <= kTransformTol && group <= kTransformTol;
    return {ok, fmt("round trip %.3g, unitarity %.3g, group law %.3g (tol %.0e)", round_trip, unitarity, group, kTransformTol),
            5.0};
}

Outcome resonance_identity() {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> kd(-2, 8), jd(0, 16);
    std::uniform_int_distribution<long> nd(-4096, 4096), md(-65536, 65536);
    double worst = 0.0;
    const int samples = 1000000;
    for (int s = 0; s < samples; ++s) {
        const BlockTriple t{kd(rng), jd(rng), kd(rng), jd(rng), kd(rng), jd(rng)};
        const BlockLattice lat = BlockLattice::for_triple(t, 8.0);
        const double xi1 = nd(rng) * lat.h, xi2 = nd(rng) * lat.h;
        const double tau1 = md(rng) * lat.delta, tau2 = md(rng) * lat.delta;
        const double xi = xi1 + xi2;
        const double r = resonance(xi1, tau1, xi2, tau2);
        const double scale = std::max({1.0, xi1 * xi1, xi2 * xi2, xi * xi, std::abs(tau1), std::abs(tau2)});
        worst = std::max(worst, std::abs(r - 2.0 * xi * xi2) / scale);
    }
    const double eps = std::numeric_limits<double>::epsilon();
    return {worst <= kResonanceEps * eps,
            fmt("max scaled defect %.2f eps over %d lattice triples (tol %.0f eps)", worst / eps, samples, kResonanceEps), 1.0};
}

Outcome block_scan() {
    ScanOptions o;
    o.max_orbits = kScanOrbits;
    o.max_work = kScanWork;
    o.keep_infeasible = false;
    const ScanReport r = scan(o);
    const ScanSummary& S = r.summary;
    const double witness = S.per_case_max_ratio.count(CaseLabel::i) ? S.per_case_max_ratio.at(CaseLabel::i) : 0.0;
    const bool zeros = S.infeasible_nonzero == 0 && S.infeasible_unresolved == 0;
    const bool ok = zeros && S.scan_constant <= kScanConstant && std::abs(S.slope_kmax) < kScanSlope &&
                    std::abs(S.slope_jmax) < kScanSlope && witness >= kWitnessFraction * kScanConstant &&
                    S.nonconverged == 0;
    return {ok,
            fmt("%zu infeasible (nonzero %zu, unresolved %zu); %zu/%zu orbits measured (%zu eligible), %zu triples rated; "
                "max ratio %.4g (C_scan %.1f); slopes kmax %.4f jmax %.4f (tol %.1f); case-i witness %.4g; nonconverged %zu",
                S.infeasible, S.infeasible_nonzero, S.infeasible_unresolved, S.orbits_measured, S.orbits_total,
                S.orbits_eligible, S.slope_samples, S.scan_constant, kScanConstant, S.slope_kmax, S.slope_jmax, kScanSlope,
                witness, S.nonconverged),
            0.0};
}

Outcome oracle_equivalence() {
    struct Candidate {
        std::size_t points;
        BlockTriple t;
    };
    std::vector<Candidate> cands;
    std::set<std::array<int, 6>> seen;
    for (int k1 = -2; k1 <= 2; ++k1)
        for (int k2 = -2; k2 <= 2; ++k2)
            for (int k3 = -2; k3 <= 2; ++k3)
                for (int j1 = 0; j1 <= 5; ++j1)
                    for (int j2 = 0; j2 <= 5; ++j2)
                        for (int j3 = 0; j3 <= 5; ++j3) {
                            const BlockTriple t{k1, j1, k2, j2, k3, j3};
                            if (!classify(t).feasible) continue;
                            const BlockLattice lat = BlockLattice::for_triple(t, 8.0);
                            if (structurally_zero(t, Sidedness::two_sided, lat)) continue;
                            const double rough = estimated_work(t, 8.0, Sidedness::two_sided);
                            if (rough > 4e7) continue;
                            std::size_t pts = 0;
                            try {
                                pts = block_region(k2, j2, lat, false, Sidedness::two_sided).size() +
                                      block_region(k3, j3, lat, true, Sidedness::two_sided).size();
                            } catch (const ContractViolation&) {
                                continue;
                            }
                            if (pts <= kOraclePoints) cands.push_back({pts, t});
                        }
    // Spread the sample over the candidate list, ordered by size.
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.points != b.points ? a.points < b.points : a.t.str() < b.t.str();
    });
    std::vector<Candidate> chosen;
    for (std::size_t i = 0; i < kOracleTriples && !cands.empty(); ++i)
        chosen.push_back(cands[i * cands.size() / kOracleTriples]);
    double worst = 0.0;
    std::size_t compared = 0, zero_agree = 0;
    std::string worst_triple;
    for (const Candidate& c : chosen) {
        const double oracle = oracle_block_norm(c.t);
        const MeasuredNorm m = measure_block_norm(c.t);
        if (oracle == 0.0) {
            if (m.value == 0.0) ++zero_agree;
            else worst = std::numeric_limits<double>::infinity();
            continue;
        }
        ++compared;
        const double rel = std::abs(m.value - oracle) / oracle;
        if (rel > worst) {
            worst = rel;
            worst_triple = c.t.str();
        }
    }
    return {chosen.size() >= kOracleTriples && worst <= kOracleTol,
            fmt("%zu of %zu capped triples compared (%zu nonzero, %zu both zero), max rel diff %.3g at %s (tol %.0e)",
                chosen.size(), cands.size(), compared, zero_agree, worst, worst_triple.c_str(), kOracleTol),
            0.0};
}

Outcome divergence() {
    const DivergenceReport r = divergence_experiment({});
    const double low4 = r.rows.at(4).fbar_low, low12 = r.rows.at(12).fbar_low;
    const bool ok = r.xsb_slope >= kDivergenceSlopeFraction * r.increment_at_4 && r.xsb_slope > 0.0 &&
                    low12 <= kDivergenceLowGrowth * low4;
    return {ok,
            fmt("X^{-1/4,1/2} slope %.4g vs K=4 increment %.4g (need >= %.1fx); F-bar low K=12/K=4 = %.4f (tol %.1f)",
                r.xsb_slope, r.increment_at_4, kDivergenceSlopeFraction, low12 / low4, kDivergenceLowGrowth),
            120.0};
}

Outcome embedding() {
    const ConstantReport r = embedding_experiment({});
    return {std::abs(r.trend_slope) < kEmbeddingSlope,
            fmt("k=1..10, %zu draws: max C %.4f, trend slope %.4f (tol %.2f)", r.ratios.size(), r.max_ratio, r.trend_slope,
                kEmbeddingSlope),
            0.0};
}

Outcome bilinear() {
    EnsembleOptions o;
    o.ensemble_size = 200;
    const ConstantReport r = bilinear_estimate_experiment(o);
    const bool ok = r.max_ratio <= kBilinearFactor * r.fixture && r.trend_slope < kBilinearSlope;
    return {ok,
            fmt("%zu pairs (%zu skipped): max %.4g vs single-shell %.4g (ratio %.3f, tol %.0f); slope %.4f (tol %.1f)",
                r.ratios.size(), r.skipped, r.max_ratio, r.fixture, r.max_ratio / r.fixture, kBilinearFactor,
                r.trend_slope, kBilinearSlope),
            0.0};
}

Outcome picard() {
    const PhaseGrid g = picard_grid();
    const auto t0 = std::chrono::steady_clock::now();
    const PicardResult a = picard_solve(gaussian_data(g, 0.1), g);
    const double probe = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double worst_ratio = 0.0;
    for (double r : a.report.ratios) worst_ratio = std::max(worst_ratio, r);
    const PhaseGrid fine = PhaseGrid::make(g.nx, 2 * g.nt, g.xlen, g.tlen);
    const PicardResult b = picard_solve(gaussian_data(fine, 0.1), fine);
    const double halving = std::abs(b.report.solution_l2 - a.report.solution_l2) / a.report.solution_l2;
    const PicardResult big = picard_solve(gaussian_data(g, 50.0), g);
    const bool ok = a.report.converged && !a.report.ratios.empty() && worst_ratio <= kContraction &&
                    a.report.final_residual <= kPicardResidual && halving < kPicardHalving && !big.report.contracted &&
                    probe < 120.0;
    return {ok,
            fmt("%d iterations, max contraction %.4f (tol %.1f), residual %.3g (tol %.0e), dt-halving L2 change %.3g "
                "(tol %.0e), probe %.1f s; amp 50 contracted=%s",
                a.report.iterations, worst_ratio, kContraction, a.report.final_residual, kPicardResidual, halving,
                kPicardHalving, probe, big.report.contracted ? "true" : "false"),
            0.0};
}

Outcome term_ii() {
    const TermIIReport r = term_II_kernel_check({});
    const RegionSweep s = region_sweep(6, 4.0);
    const double bound = std::min(r.min_denominator_ratio, s.min_denominator_ratio);
    return {!r.skipped && r.defect <= kTermIIDefect && bound >= kDenominatorBound,
            fmt("kernel defect %.3g over %zu A2 terms (tol %.0e); denominator / |xi xi1| >= %.4f on %zu A2 lattice points "
                "(need %.2f)",
                r.defect, r.a2_terms, kTermIIDefect, bound, s.counts[1], kDenominatorBound),
            0.0};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"frame suite", frame_suite},
        {"transform suite", transform_suite},
        {"resonance identity", resonance_identity},
        {"block scan", block_scan},
        {"oracle equivalence", oracle_equivalence},
        {"divergence experiment", divergence},
        {"embedding constant", embedding},
        {"bilinear ensemble", bilinear},
        {"picard probe", picard},
        {"term II kernel", term_ii},
    };
    std::set<int> only;
    for (int a = 1; a < argc; ++a) only.insert(std::atoi(argv[a]));
    int failed = 0;
    for (std::size_t c = 0; c < criteria.size(); ++c) {
        const int id = static_cast<int>(c) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[c].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what(), 0.0};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.budget > 0.0 && secs > o.budget) {
            o.pass = false;
            o.detail += fmt("; runtime over %.0f s budget", o.budget);
        }
        std::printf("criterion %2d %s  %-22s %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", criteria[c].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed ? 1 : 0;
}

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "qslab/block_norm.hpp"
#include "qslab/blocks.hpp"
#include "qslab/error.hpp"

using namespace qslab;

namespace {

MeasureOptions one_sided(double density = 8.0) {
    MeasureOptions o;
    o.density = density;
    o.sidedness = Sidedness::one_sided;
    return o;
}

nlohmann::json fixture(const char* name) {
    std::ifstream in(std::string(QSLAB_FIXTURE_DIR) + "/" + name);
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("block membership and lattice regions") {
    const BlockLattice lat = BlockLattice::for_block(2, 0, 8.0);
    const auto pts = block_region(2, 0, lat);
    CHECK(!pts.empty());
    for (const auto& p : pts) {
        CHECK(p.xi >= 2.0);
        CHECK(p.xi <= 8.0);
        CHECK(std::abs(p.tau + p.xi * p.xi) <= 2.0 + 1e-12);
        CHECK(in_block(2, 0, p.xi, p.tau));
    }
    CHECK(in_block(2, 0, 4.0, -16.0));
    CHECK(!in_block(2, 0, -4.0, 16.0));
    CHECK(in_block(2, 0, -4.0, 16.0, true));
    for (const auto& p : block_region(2, 0, lat, true))
        CHECK(in_block(2, 0, p.xi, p.tau, true));
    for (const auto& p : block_region(3, 4, BlockLattice::for_block(3, 4, 4.0), false, Sidedness::two_sided))
        CHECK(in_block(3, 4, p.xi, p.tau, false, Sidedness::two_sided));

    CHECK_THROWS_WITH_AS(block_region(1, 0, BlockLattice{100.0, 1.0}), doctest::Contains("finer density"),
                         ContractViolation);
    CHECK_THROWS_AS(block_region(1, -1, lat), ContractViolation);
    CHECK_THROWS_AS((BlockTriple{1, -1, 1, 0, 1, 0}.validate()), ContractViolation);
}

TEST_CASE("case classification examples") {
    const CasePrediction a = classify({10, 20, 10, 5, 10, 5});
    CHECK(a.feasible);
    CHECK(a.label == CaseLabel::i);
    CHECK(a.predicted == doctest::Approx(std::pow(2.0, 2.5) * std::pow(2.0, 1.25)));

    const CasePrediction z = classify({10, 5, 10, 6, 10, 7});
    CHECK(!z.feasible);
    CHECK(z.label == CaseLabel::zero);
    CHECK(z.predicted == 0.0);

    const CasePrediction c = classify({0, 25, 10, 3, 10, 3});
    CHECK(c.feasible);
    CHECK(c.label == CaseLabel::iii);
    CHECK(c.predicted == doctest::Approx(0.25));
}

TEST_CASE("classifier invariants over random triples") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> kd(-4, 12), jd(0, 24);
    int seen[4] = {0, 0, 0, 0};
    for (int n = 0; n < 200000; ++n) {
        const BlockTriple t{kd(rng), jd(rng), kd(rng), jd(rng), kd(rng), jd(rng)};
        const CasePrediction p = classify(t);
        const bool constraints = frequency_constraint_holds(t) && modulation_constraint_holds(t);
        CHECK(p.feasible == constraints);
        CHECK((p.label == CaseLabel::zero) == !p.feasible);
        CHECK((p.predicted == 0.0) == !p.feasible);
        CHECK(p.predicted >= 0.0);
        ++seen[static_cast<int>(p.label)];
        // Cases (i) and (iii) are symmetric in the output and v blocks; (ii) is not.
        const CasePrediction d = classify(t.dual());
        if (p.label != CaseLabel::ii && d.label != CaseLabel::ii) CHECK(d.predicted == doctest::Approx(p.predicted));
    }
    for (int c = 0; c < 4; ++c) CHECK(seen[c] > 0);
}

TEST_CASE("resonance identity on lattice triples") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> nd(-4096, 4096);
    const BlockLattice lat{1.0 / 64.0, 1.0 / 256.0};
    double worst = 0.0;
    for (int n = 0; n < 200000; ++n) {
        const double xi1 = nd(rng) * lat.h, xi2 = nd(rng) * lat.h;
        const double tau1 = nd(rng) * lat.delta * 64.0, tau2 = nd(rng) * lat.delta * 64.0;
        const double r = resonance(xi1, tau1, xi2, tau2);
        const double expect = 2.0 * (xi1 + xi2) * xi2;
        const double scale = std::max({1.0, xi1 * xi1, xi2 * xi2, std::abs(tau1), std::abs(tau2)});
        worst = std::max(worst, std::abs(r - expect) / scale);
    }
    CHECK(worst <= 4.0 * std::numeric_limits<double>::epsilon());
}

TEST_CASE("infeasible triples measure zero") {
    const MeasuredNorm m = measure_block_norm({10, 5, 10, 6, 10, 7});
    CHECK(m.value == 0.0);
    CHECK(m.structural_zero);
    for (double d : {4.0, 8.0, 16.0}) {
        for (const BlockTriple& t : {BlockTriple{1, 0, 6, 0, 1, 0}, BlockTriple{2, 0, 2, 0, 2, 0}, BlockTriple{0, 1, 5, 2, 5, 2}}) {
            if (classify(t).feasible) continue;
            MeasureOptions o;
            o.density = d;
            CHECK(measure_block_norm(t, o).value == 0.0);
        }
    }
    CHECK(oracle_block_norm({6, 0, -2, 0, -2, 0}) == 0.0);
}

TEST_CASE("power iteration agrees with the dense oracle on the reference triple") {
    const BlockTriple t{1, 0, 1, 0, 1, 0};
    const MeasuredNorm m = measure_block_norm(t, one_sided());
    OracleOptions oo;
    oo.sidedness = Sidedness::one_sided;
    const double oracle = oracle_block_norm(t, oo);
    CHECK(m.converged);
    CHECK(std::abs(m.value - oracle) <= 1e-6 * oracle);

    const auto fx = fixture("block_norm_reference.json");
    CHECK(fx["density"] == 8.0);
    CHECK(oracle == doctest::Approx(fx["oracle"].get<double>()).epsilon(1e-8));
}

TEST_CASE("oracle size cap") {
    CHECK_THROWS_WITH_AS(oracle_block_norm({0, 0, 1, 2, 1, 1}), doctest::Contains("cap"), ContractViolation);
}

TEST_CASE("duality exchange and dilation covariance") {
    for (const BlockTriple& t : {BlockTriple{1, 0, 1, 0, 1, 0}, BlockTriple{1, 1, 1, 2, 1, 3}, BlockTriple{2, 2, 2, 5, 2, 3}}) {
        const double a = measure_block_norm(t, one_sided()).value;
        const double b = measure_block_norm(t.dual(), one_sided()).value;
        CHECK(std::abs(a - b) <= 1e-6 * a);
    }
    // The lattice follows the parabolic dilation exactly once every j >= 1.
    const BlockTriple t{1, 1, 1, 2, 1, 3};
    const double base = measure_block_norm(t, one_sided()).value;
    CHECK(measure_block_norm(t.dilated(1), one_sided()).value == doctest::Approx(std::pow(2.0, 1.5) * base).epsilon(1e-8));
}

TEST_CASE("restarts never lower the value") {
    const BlockTriple t{2, 2, 2, 5, 2, 3};
    double prev = 0.0;
    for (int r = 1; r <= 6; ++r) {
        MeasureOptions o = one_sided();
        o.restarts = r;
        const double v = measure_block_norm(t, o).value;
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("density doubling from 16 to 32 moves values by less than 5%") {
    for (const BlockTriple& t : {BlockTriple{1, 0, 1, 0, 1, 0}, BlockTriple{1, 1, 1, 2, 1, 3}}) {
        MeasureOptions a = one_sided(16.0), b = one_sided(32.0);
        a.restarts = b.restarts = 4;
        const double va = measure_block_norm(t, a).value, vb = measure_block_norm(t, b).value;
        CHECK(std::abs(vb - va) < 0.05 * va);
    }
}

TEST_CASE("measurement contracts") {
    MeasureOptions o;
    o.restarts = 0;
    CHECK_THROWS_AS(measure_block_norm({1, 0, 1, 0, 1, 0}, o), ContractViolation);
    MeasureOptions tiny;
    tiny.max_work = 10.0;
    CHECK_THROWS_WITH_AS(measure_block_norm({1, 1, 1, 2, 1, 3}, tiny), doctest::Contains("cap"), ContractViolation);
}

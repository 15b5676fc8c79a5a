#include <doctest.h>

#include <sstream>
#include <string>

#include "qslab/error.hpp"
#include "qslab/parallel.hpp"
#include "qslab/scan.hpp"

using namespace qslab;

namespace {

ScanOptions small_scan() {
    ScanOptions o;
    o.k_lo = 0;
    o.k_hi = 1;
    o.j_lo = 0;
    o.j_hi = 4;
    o.density = 4.0;
    o.restarts = 2;
    o.seed = 3;
    o.max_work = 5e4;
    return o;
}

std::string csv(const ScanReport& r) {
    std::ostringstream os;
    r.write_csv(os);
    return os.str();
}

}  // namespace

TEST_CASE("least-squares slope") {
    CHECK(ls_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
    CHECK(ls_slope({1}, {4}) == 0.0);
    CHECK(ls_slope({2, 2, 2}, {1, 5, 9}) == 0.0);
}

TEST_CASE("derived seeds depend only on base seed and key") {
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(2, {2, 3}));
    CHECK(resolve_workers(3) == 3);
}

TEST_CASE("small scan: counts, zeros and CSV layout") {
    const ScanReport r = scan(small_scan());
    const auto& S = r.summary;
    CHECK(S.triples == 2u * 2u * 2u * 5u * 5u * 5u);
    CHECK(S.triples == S.feasible + S.infeasible);
    CHECK(S.infeasible_nonzero == 0);
    CHECK(S.infeasible_max_value == 0.0);
    CHECK(S.orbits_measured > 0);
    for (const auto& e : r.entries) {
        CHECK(e.measured.value >= 0.0);
        if (!e.prediction.feasible) CHECK(e.measured.value == 0.0);
        if (e.prediction.feasible) CHECK(e.ratio <= S.scan_constant);
    }
    const std::string text = csv(r);
    CHECK(text.rfind("k1,j1,k2,j2,k3,j3,case,predicted,measured,ratio,converged,restarts\n", 0) == 0);
    const auto j = r.summary_json();
    CHECK(j.contains("per_case_max_ratio"));
    CHECK(j.contains("slopes"));
    CHECK(j["scan_constant"] == S.scan_constant);
}

TEST_CASE("scan output is independent of the worker count") {
    ScanOptions a = small_scan(), b = small_scan();
    a.workers = 1;
    b.workers = 3;
    CHECK(csv(scan(a)) == csv(scan(b)));
}

TEST_CASE("scan contracts") {
    ScanOptions o = small_scan();
    o.k_lo = 3;
    o.k_hi = 2;
    CHECK_THROWS_AS(scan(o), ContractViolation);
    ScanOptions p = small_scan();
    p.j_lo = -1;
    CHECK_THROWS_AS(scan(p), ContractViolation);
}

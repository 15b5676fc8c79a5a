#include "qslab/scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "qslab/error.hpp"
#include "qslab/parallel.hpp"

namespace qslab {

namespace {

std::uint64_t pack(const BlockTriple& t) {
    const int f[6] = {t.k1 + 128, t.j1, t.k2 + 128, t.j2, t.k3 + 128, t.j3};
    std::uint64_t key = 0;
    for (int v : f) key = (key << 8) | static_cast<std::uint64_t>(v & 0xff);
    return key;
}

// Lowest member of the dilation orbit plus the dilation step back to `t`.
BlockTriple reduce(const BlockTriple& t, int* steps) {
    const auto j = t.js();
    const int jmin = *std::min_element(j.begin(), j.end());
    const int m = jmin >= 1 ? (jmin - 1) / 2 : 0;
    *steps = m;
    return t.dilated(-m);
}

BlockTriple canonical(const BlockTriple& rep) {
    const BlockTriple d = rep.dual();
    return pack(d) < pack(rep) ? d : rep;
}

struct Orbit {
    BlockTriple rep;
    CasePrediction prediction;
    bool zero = false;
    bool eligible = false;
    bool measured = false;
    double work = 0.0;
    int stratum = 0;
    MeasuredNorm result;
};

int stratum_of(const BlockTriple& t, CaseLabel label) {
    const auto k = t.ks();
    const auto j = t.js();
    const int kspread = std::min(7, *std::max_element(k.begin(), k.end()) - *std::min_element(k.begin(), k.end()));
    const int jspread = std::min(4, (*std::max_element(j.begin(), j.end()) - *std::min_element(j.begin(), j.end())) / 3);
    return (static_cast<int>(label) * 8 + kspread) * 5 + jspread;
}

template <class F>
void for_each_triple(const ScanOptions& o, F&& f) {
    for (int k1 = o.k_lo; k1 <= o.k_hi; ++k1)
        for (int k2 = o.k_lo; k2 <= o.k_hi; ++k2)
            for (int k3 = o.k_lo; k3 <= o.k_hi; ++k3)
                for (int j1 = o.j_lo; j1 <= o.j_hi; ++j1)
                    for (int j2 = o.j_lo; j2 <= o.j_hi; ++j2)
                        for (int j3 = o.j_lo; j3 <= o.j_hi; ++j3) f(BlockTriple{k1, j1, k2, j2, k3, j3});
}

MeasureOptions measure_options(const ScanOptions& o) {
    MeasureOptions m;
    m.density = o.density;
    m.restarts = o.restarts;
    m.seed = o.seed;
    m.sidedness = o.sidedness;
    return m;
}

}  // namespace

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

ScanReport scan(const ScanOptions& o) {
    if (o.k_lo > o.k_hi || o.j_lo > o.j_hi) throw ContractViolation("scan: empty k or j range");
    if (o.j_lo < 0) throw ContractViolation("scan: modulation indices must be >= 0");
    ScanReport report;
    report.options = o;
    ScanSummary& S = report.summary;
    const MeasureOptions mo = measure_options(o);

    std::unordered_map<std::uint64_t, std::size_t> orbit_index;
    std::vector<Orbit> orbits;
    std::vector<BlockTriple> infeasible_open;

    for_each_triple(o, [&](const BlockTriple& t) {
        ++S.triples;
        const CasePrediction pred = classify(t);
        if (!pred.feasible) {
            ++S.infeasible;
            if (!structurally_zero(t, o.sidedness, BlockLattice::for_triple(t, o.density))) infeasible_open.push_back(t);
            return;
        }
        ++S.feasible;
        int steps = 0;
        const BlockTriple rep = canonical(reduce(t, &steps));
        const std::uint64_t key = pack(rep);
        if (orbit_index.find(key) != orbit_index.end()) return;
        orbit_index.emplace(key, orbits.size());
        Orbit ob;
        ob.rep = rep;
        ob.prediction = classify(rep);
        orbits.push_back(ob);
    });
    S.orbits_total = orbits.size();

    // Exact zeros need no sampling; the rest are stratified and taken cheapest first under the work cap.
    std::map<int, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        Orbit& ob = orbits[i];
        ob.zero = structurally_zero(ob.rep, o.sidedness, BlockLattice::for_triple(ob.rep, o.density));
        if (ob.zero) continue;
        ob.work = estimated_work(ob.rep, o.density, o.sidedness);
        ob.eligible = ob.work <= o.max_work;
        if (!ob.eligible) continue;
        ++S.orbits_eligible;
        ob.stratum = stratum_of(ob.rep, ob.prediction.label);
        strata[ob.stratum].push_back(i);
    }
    std::vector<std::size_t> chosen;
    if (o.max_orbits == 0) {
        for (auto& [s, list] : strata) chosen.insert(chosen.end(), list.begin(), list.end());
    } else {
        for (auto& [s, list] : strata)
            std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
                if (orbits[a].work != orbits[b].work) return orbits[a].work < orbits[b].work;
                const auto ha = derive_seed(o.seed, {static_cast<std::int64_t>(pack(orbits[a].rep))});
                const auto hb = derive_seed(o.seed, {static_cast<std::int64_t>(pack(orbits[b].rep))});
                return ha != hb ? ha < hb : a < b;
            });
        // Round-robin over strata until the budget is spent.
        std::size_t round = 0;
        bool progress = true;
        while (chosen.size() < o.max_orbits && progress) {
            progress = false;
            for (auto& [s, list] : strata) {
                if (round < list.size() && chosen.size() < o.max_orbits) {
                    chosen.push_back(list[round]);
                    progress = true;
                }
            }
            ++round;
        }
        std::sort(chosen.begin(), chosen.end());
    }

    const int workers = resolve_workers(o.workers);
    parallel_for(chosen.size(), workers, [&](std::size_t c) {
        Orbit& ob = orbits[chosen[c]];
        ob.result = measure_block_norm(ob.rep, mo);
        ob.measured = true;
    });
    S.orbits_measured = chosen.size();

    std::vector<MeasuredNorm> open_results(infeasible_open.size());
    std::vector<char> open_done(infeasible_open.size(), 0);
    parallel_for(infeasible_open.size(), workers, [&](std::size_t c) {
        if (estimated_work(infeasible_open[c], o.density, o.sidedness) > o.max_work) return;
        open_results[c] = measure_block_norm(infeasible_open[c], mo);
        open_done[c] = 1;
    });
    for (std::size_t c = 0; c < infeasible_open.size(); ++c) {
        if (!open_done[c]) {
            ++S.infeasible_unresolved;
            continue;
        }
        if (open_results[c].value > 0.0) ++S.infeasible_nonzero;
        S.infeasible_max_value = std::max(S.infeasible_max_value, open_results[c].value);
    }

    std::vector<double> xk, xj, yr, xk3, yr3;
    std::size_t open_cursor = 0;
    for_each_triple(o, [&](const BlockTriple& t) {
        const CasePrediction pred = classify(t);
        if (!pred.feasible) {
            ScanEntry e{t, pred, {}, 0.0};
            e.measured.density = o.density;
            if (open_cursor < infeasible_open.size() && infeasible_open[open_cursor] == t) {
                if (open_done[open_cursor]) e.measured = open_results[open_cursor];
                ++open_cursor;
            } else {
                e.measured.structural_zero = true;
            }
            if (o.keep_infeasible) report.entries.push_back(e);
            return;
        }
        int steps = 0;
        const BlockTriple rep = canonical(reduce(t, &steps));
        const Orbit& ob = orbits[orbit_index.at(pack(rep))];
        if (!ob.zero && !ob.measured) {
            ++S.feasible_unresolved;
            return;
        }
        ++S.feasible_resolved;
        ScanEntry e{t, pred, {}, 0.0};
        if (ob.zero) {
            ++S.feasible_structural_zero;
            e.measured.structural_zero = true;
            e.measured.density = o.density;
        } else {
            e.measured = ob.result;
            e.measured.value = ob.result.value * std::exp2(1.5 * steps);
            if (!e.measured.converged) ++S.nonconverged;
        }
        e.ratio = e.measured.value / pred.predicted;
        auto& mx = S.per_case_max_ratio[pred.label];
        mx = std::max(mx, e.ratio);
        ++S.per_case_count[pred.label];
        S.scan_constant = std::max(S.scan_constant, e.ratio);
        if (e.ratio > 0.0) {
            const auto k = t.ks();
            const auto j = t.js();
            const double kmax = *std::max_element(k.begin(), k.end());
            xk.push_back(kmax);
            xj.push_back(*std::max_element(j.begin(), j.end()));
            yr.push_back(std::log2(e.ratio));
            if (pred.label == CaseLabel::iii) {
                xk3.push_back(kmax);
                yr3.push_back(std::log2(e.ratio));
            }
        }
        report.entries.push_back(e);
    });
    S.slope_kmax = ls_slope(xk, yr);
    S.slope_jmax = ls_slope(xj, yr);
    S.slope_kmax_case_iii = ls_slope(xk3, yr3);
    S.slope_samples = yr.size();
    return report;
}

nlohmann::json ScanReport::summary_json() const {
    const ScanSummary& S = summary;
    nlohmann::json j;
    auto& pc = j["per_case_max_ratio"] = nlohmann::json::object();
    for (const auto& [c, v] : S.per_case_max_ratio) pc[to_string(c)] = v;
    auto& cnt = j["per_case_count"] = nlohmann::json::object();
    for (const auto& [c, v] : S.per_case_count) cnt[to_string(c)] = v;
    j["slopes"] = {{"log2_ratio_vs_kmax", S.slope_kmax},
                   {"log2_ratio_vs_jmax", S.slope_jmax},
                   {"log2_ratio_vs_kmax_case_iii", S.slope_kmax_case_iii},
                   {"samples", S.slope_samples}};
    j["scan_constant"] = S.scan_constant;
    j["counts"] = {{"triples", S.triples},
                   {"infeasible", S.infeasible},
                   {"infeasible_nonzero", S.infeasible_nonzero},
                   {"infeasible_unresolved", S.infeasible_unresolved},
                   {"infeasible_max_value", S.infeasible_max_value},
                   {"feasible", S.feasible},
                   {"feasible_resolved", S.feasible_resolved},
                   {"feasible_structural_zero", S.feasible_structural_zero},
                   {"feasible_unresolved", S.feasible_unresolved},
                   {"orbits_total", S.orbits_total},
                   {"orbits_eligible", S.orbits_eligible},
                   {"orbits_measured", S.orbits_measured},
                   {"nonconverged", S.nonconverged}};
    j["config"] = {{"k_range", {options.k_lo, options.k_hi}},
                   {"j_range", {options.j_lo, options.j_hi}},
                   {"density", options.density},
                   {"restarts", options.restarts},
                   {"seed", options.seed},
                   {"max_orbits", options.max_orbits},
                   {"max_work", options.max_work},
                   {"sidedness", options.sidedness == Sidedness::two_sided ? "two_sided" : "one_sided"}};
    return j;
}

void write_csv_header(std::ostream& os) {
    os << "k1,j1,k2,j2,k3,j3,case,predicted,measured,ratio,converged,restarts\n";
}

void write_csv_row(std::ostream& os, const ScanEntry& e) {
    char buf[256];
    const auto& t = e.triple;
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%d,%d,%s,%.17g,%.17g,%.17g,%d,%d\n", t.k1, t.j1, t.k2, t.j2, t.k3, t.j3,
                  to_string(e.prediction.label).c_str(), e.prediction.predicted, e.measured.value, e.ratio,
                  e.measured.converged ? 1 : 0, e.measured.restarts);
    os << buf;
}

void ScanReport::write_csv(std::ostream& os) const {
    write_csv_header(os);
    for (const auto& e : entries) write_csv_row(os, e);
}

}  // namespace qslab

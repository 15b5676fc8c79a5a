#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "qslab/block_norm.hpp"
#include "qslab/blocks.hpp"

namespace qslab {

struct ScanOptions {
    int k_lo = -2, k_hi = 8;
    int j_lo = 0, j_hi = 16;
    double density = 8.0;
    int restarts = 16;
    std::uint64_t seed = 1;
    int workers = 0;
    Sidedness sidedness = Sidedness::two_sided;
    // Orbits (parabolic dilation + output/v exchange) measured at most; 0 means every eligible orbit.
    std::size_t max_orbits = 0;
    // Orbit representatives above this estimated workload are left unresolved.
    double max_work = 2e6;
    // Keep one entry per infeasible triple in the report (the CLI streams them to CSV).
    bool keep_infeasible = true;
};

struct ScanEntry {
    BlockTriple triple;
    CasePrediction prediction;
    MeasuredNorm measured;
    double ratio = 0.0;
};

struct ScanSummary {
    std::size_t triples = 0;
    std::size_t infeasible = 0;
    std::size_t infeasible_nonzero = 0;
    std::size_t infeasible_unresolved = 0;
    double infeasible_max_value = 0.0;
    std::size_t feasible = 0;
    std::size_t feasible_resolved = 0;
    std::size_t feasible_structural_zero = 0;
    std::size_t feasible_unresolved = 0;
    std::size_t orbits_total = 0;
    std::size_t orbits_eligible = 0;
    std::size_t orbits_measured = 0;
    std::size_t nonconverged = 0;
    std::map<CaseLabel, double> per_case_max_ratio;
    std::map<CaseLabel, std::size_t> per_case_count;
    double scan_constant = 0.0;
    double slope_kmax = 0.0;
    double slope_jmax = 0.0;
    double slope_kmax_case_iii = 0.0;
    std::size_t slope_samples = 0;
};

struct ScanReport {
    ScanOptions options;
    std::vector<ScanEntry> entries;
    ScanSummary summary;

    nlohmann::json summary_json() const;
    void write_csv(std::ostream& os) const;
};

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const ScanEntry& e);

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

ScanReport scan(const ScanOptions& opts);

}  // namespace qslab

// qslab command-line driver. Every command prints one JSON document (scan can also stream CSV)
// with the resolved configuration embedded. Exit codes: 0 ok, 2 contract violation,
// 3 non-convergence, 1 anything else.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qslab/block_norm.hpp"
#include "qslab/blocks.hpp"
#include "qslab/divergence.hpp"
#include "qslab/error.hpp"
#include "qslab/norms.hpp"
#include "qslab/parallel.hpp"
#include "qslab/qsf1.hpp"
#include "qslab/regions.hpp"
#include "qslab/scan.hpp"
#include "qslab/spacetime.hpp"
#include "qslab/wellposed.hpp"

using nlohmann::json;
using namespace qslab;

namespace {

struct RunConfig {
    int nx = 1024;
    int nt = 1024;
    double xlen = 64.0 * std::numbers::pi;
    double tlen = 8.0;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string out;
    std::string format = "json";

    json to_json() const {
        return {{"nx", nx},     {"nt", nt},           {"xlen", xlen},   {"tlen", tlen},
                {"seed", seed}, {"workers", workers}, {"out", out},     {"format", format}};
    }
};

std::pair<int, int> parse_range(const std::string& s) {
    const auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            const int v = std::stoi(s);
            return {v, v};
        }
        return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
    } catch (const std::exception&) {
        throw ContractViolation("cannot parse range '" + s + "', expected lo..hi");
    }
}

std::array<int, 3> parse_triple(const std::string& s) {
    std::array<int, 3> v{};
    std::stringstream ss(s);
    std::string item;
    int n = 0;
    while (std::getline(ss, item, ',')) {
        if (n == 3) throw ContractViolation("expected three comma-separated integers, got '" + s + "'");
        try {
            v[n++] = std::stoi(item);
        } catch (const std::exception&) {
            throw ContractViolation("cannot parse integer '" + item + "' in '" + s + "'");
        }
    }
    if (n != 3) throw ContractViolation("expected three comma-separated integers, got '" + s + "'");
    return v;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

PhaseGrid time_grid(const RunConfig& c, int nx, double xlen) { return PhaseGrid::make(nx, c.nt, xlen, c.tlen); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qslab: frequency-space laboratory for i u_t + u_xx = |u|^2 at s = -1/4"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    app.add_option("--nx", cfg.nx, "spatial lattice size")->capture_default_str();
    auto* nt_opt = app.add_option("--nt", cfg.nt, "time lattice size")->capture_default_str();
    app.add_option("--xlen", cfg.xlen, "spatial period")->capture_default_str();
    auto* tlen_opt = app.add_option("--tlen", cfg.tlen, "time window length")->capture_default_str();
    app.add_option("--seed", cfg.seed, "base seed")->capture_default_str();
    app.add_option("--workers", cfg.workers, "worker threads (falls back to QSLAB_WORKERS)");
    app.add_option("--out", cfg.out, "output path");
    app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // gen
    auto* gen = app.add_subcommand("gen", "write initial data in QSF1 format");
    std::string gen_kind;
    double gen_amp = 1.0;
    int gen_k = 1;
    gen->add_option("kind", gen_kind, "gaussian | shell | random-shell")
        ->required()
        ->check(CLI::IsMember({"gaussian", "shell", "random-shell"}));
    gen->add_option("--amp", gen_amp, "amplitude (L2 norm for shells, peak for the Gaussian)");
    gen->add_option("--k", gen_k, "frequency shell");

    // norm
    auto* norm = app.add_subcommand("norm", "norm of a QSF1 file");
    std::string norm_file, norm_space = "fbar";
    double norm_s = -0.25;
    std::optional<int> norm_k, norm_jmax;
    norm->add_option("file", norm_file)->required();
    norm->add_option("--space", norm_space, "xk | fbar | hs | linf_l2 | l1_l2");
    norm->add_option("-s,--s", norm_s, "regularity");
    norm->add_option("--k", norm_k, "shell for xk");
    norm->add_option("--j-max", norm_jmax, "modulation cap for xk");

    // evolve
    auto* evolve = app.add_subcommand("evolve", "free evolution W(t) of initial data");
    std::string evolve_file;
    double evolve_t = 0.0;
    evolve->add_option("file", evolve_file)->required();
    evolve->add_option("--t", evolve_t, "time")->required();

    // picard
    auto* picard = app.add_subcommand("picard", "Picard iteration for the Duhamel fixed point");
    std::string picard_file;
    PicardOptions popt;
    picard->add_option("file", picard_file)->required();
    picard->add_option("--iters", popt.max_iters, "maximum iterations")->capture_default_str();
    picard->add_option("--tol", popt.tol, "F-bar difference tolerance")->capture_default_str();

    // blocknorm
    auto* block = app.add_subcommand("blocknorm", "restricted convolution norm of one block triple");
    std::string block_k, block_j;
    MeasureOptions mopt;
    block->add_option("--k", block_k, "k1,k2,k3")->required();
    block->add_option("--j", block_j, "j1,j2,j3")->required();
    block->add_option("--density", mopt.density)->capture_default_str();
    block->add_option("--restarts", mopt.restarts)->capture_default_str();

    // scan
    auto* scan_cmd = app.add_subcommand("scan", "scan block triples against the predicted bounds");
    std::string scan_k = "-2..8", scan_j = "0..16";
    ScanOptions sopt;
    scan_cmd->add_option("--k", scan_k, "k range lo..hi")->capture_default_str();
    scan_cmd->add_option("--j", scan_j, "j range lo..hi")->capture_default_str();
    scan_cmd->add_option("--density", sopt.density)->capture_default_str();
    scan_cmd->add_option("--restarts", sopt.restarts)->capture_default_str();
    scan_cmd->add_option("--max-orbits", sopt.max_orbits, "orbits measured (0 = all)")->capture_default_str();
    scan_cmd->add_option("--max-work", sopt.max_work, "per-orbit workload cap")->capture_default_str();

    // divergence
    auto* div = app.add_subcommand("divergence", "high x high -> low partial sums");
    DivergenceOptions dopt;
    div->add_option("--k-high", dopt.k_high)->capture_default_str();
    div->add_option("--K", dopt.depth_max, "range depth")->capture_default_str();

    // regions
    auto* reg = app.add_subcommand("regions", "hyperplane regions, term II kernel and term I/III decay");
    int reg_k1 = 6;
    double reg_density = 8.0;
    reg->add_option("--k1", reg_k1)->capture_default_str();
    reg->add_option("--density", reg_density)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        cfg.workers = resolve_workers(cfg.workers);
        json out;
        out["command"] = app.get_subcommands().front()->get_name();

        if (*gen) {
            const PhaseGrid g = PhaseGrid::spatial(cfg.nx, cfg.xlen);
            if (cfg.out.empty()) throw ContractViolation("gen needs --out");
            InitialData phi = gen_kind == "gaussian" ? gaussian_data(g, gen_amp)
                              : gen_kind == "shell"  ? shell_data(g, gen_k, cfg.seed, gen_amp)
                                                     : random_shell_data(g, gen_k, cfg.seed, gen_amp);
            qsf1::write(cfg.out, phi);
            out["config"] = cfg.to_json();
            out["config"]["kind"] = gen_kind;
            out["config"]["amp"] = gen_amp;
            if (gen_kind != "gaussian") out["config"]["k"] = gen_k;
            out["file"] = cfg.out;
            out["hs_norm_m1_4"] = hs_norm(phi, -0.25);
            out["l2_norm"] = l2_norm(phi);
        } else if (*norm) {
            const auto payload = qsf1::read(norm_file);
            const NormSpace space = norm_space_from_string(norm_space);
            out["config"] = cfg.to_json();
            out["config"].update({{"file", norm_file}, {"space", norm_space}, {"s", norm_s}});
            if (const auto* phi = std::get_if<InitialData>(&payload)) {
                const PhaseGrid g = time_grid(cfg, phi->grid().nx, phi->grid().xlen);
                if (space == NormSpace::hs) {
                    out["total"] = hs_norm(*phi, norm_s);
                } else {
                    out["input"] = "psi(t) W(t) phi";
                    const Field u = windowed_free_wave(*phi, g);
                    switch (space) {
                        case NormSpace::fbar: out["breakdown"] = fbar_norm(u, norm_s).to_json(); break;
                        case NormSpace::xk:
                            if (!norm_k) throw ContractViolation("norm --space xk needs --k");
                            out["breakdown"] = xk_norm(u, *norm_k, norm_jmax).to_json();
                            break;
                        case NormSpace::linf_l2: out["total"] = linf_l2(u); break;
                        case NormSpace::l1_l2: out["total"] = l1tau_l2xi(to_spectral(u)); break;
                        case NormSpace::hs: break;
                    }
                    if (out.contains("breakdown")) out["total"] = out["breakdown"]["total"];
                }
            } else {
                const Field& f = std::get<Field>(payload);
                switch (space) {
                    case NormSpace::fbar: out["breakdown"] = fbar_norm(f, norm_s).to_json(); break;
                    case NormSpace::xk:
                        if (!norm_k) throw ContractViolation("norm --space xk needs --k");
                        out["breakdown"] = xk_norm(f, *norm_k, norm_jmax).to_json();
                        break;
                    case NormSpace::linf_l2: out["total"] = linf_l2(f); break;
                    case NormSpace::l1_l2:
                        out["total"] = l1tau_l2xi(f.domain() == Domain::spectral ? f : to_spectral(f));
                        break;
                    case NormSpace::hs: throw ContractViolation("hs norm applies to initial data files");
                }
                if (out.contains("breakdown")) out["total"] = out["breakdown"]["total"];
            }
        } else if (*evolve) {
            const auto payload = qsf1::read(evolve_file);
            const auto* phi = std::get_if<InitialData>(&payload);
            if (!phi) throw ContractViolation("evolve needs an initial-data file");
            const InitialData w = free_evolve_at(*phi, evolve_t);
            if (!cfg.out.empty()) qsf1::write(cfg.out, w);
            out["config"] = cfg.to_json();
            out["config"].update({{"file", evolve_file}, {"t", evolve_t}});
            out["l2_before"] = l2_norm(*phi);
            out["l2_after"] = l2_norm(w);
        } else if (*picard) {
            const auto payload = qsf1::read(picard_file);
            const auto* phi = std::get_if<InitialData>(&payload);
            if (!phi) throw ContractViolation("picard needs an initial-data file");
            // The Duhamel window needs tlen >= 12.8; the Picard defaults keep dt = 1/128.
            const PhaseGrid pg = picard_grid();
            if (nt_opt->count() == 0) cfg.nt = pg.nt;
            if (tlen_opt->count() == 0) cfg.tlen = pg.tlen;
            const PhaseGrid g = time_grid(cfg, phi->grid().nx, phi->grid().xlen);
            const PicardResult r = picard_solve(*phi, g, popt);
            if (!cfg.out.empty()) qsf1::write(cfg.out, r.u);
            out["config"] = cfg.to_json();
            out["config"].update({{"file", picard_file}, {"iters", popt.max_iters}, {"tol", popt.tol}});
            out["report"] = r.report.to_json();
            emit(out);
            return r.report.contracted && !r.report.converged ? 3 : 0;
        } else if (*block) {
            const auto k = parse_triple(block_k), j = parse_triple(block_j);
            const BlockTriple t{k[0], j[0], k[1], j[1], k[2], j[2]};
            t.validate();
            mopt.seed = cfg.seed;
            const CasePrediction pred = classify(t);
            const MeasuredNorm m = measure_block_norm(t, mopt);
            out["config"] = cfg.to_json();
            out["config"].update({{"k", block_k}, {"j", block_j}, {"density", mopt.density}, {"restarts", mopt.restarts}});
            out["case"] = to_string(pred.label);
            out["predicted"] = pred.predicted;
            out["measured"] = m.value;
            out["ratio"] = pred.predicted > 0.0 ? m.value / pred.predicted : 0.0;
            out["converged"] = m.converged;
            out["iterations"] = m.iterations;
            out["restarts"] = m.restarts;
            out["structural_zero"] = m.structural_zero;
            emit(out);
            return m.converged ? 0 : 3;
        } else if (*scan_cmd) {
            std::tie(sopt.k_lo, sopt.k_hi) = parse_range(scan_k);
            std::tie(sopt.j_lo, sopt.j_hi) = parse_range(scan_j);
            sopt.seed = cfg.seed;
            sopt.workers = cfg.workers;
            sopt.keep_infeasible = cfg.format == "csv";
            const ScanReport r = scan(sopt);
            json summary = r.summary_json();
            summary["run"] = cfg.to_json();
            if (cfg.format == "csv") {
                std::ofstream file;
                if (!cfg.out.empty()) {
                    file.open(cfg.out);
                    if (!file) throw ContractViolation("cannot write " + cfg.out);
                }
                std::ostream& os = cfg.out.empty() ? std::cout : file;
                os << "# " << summary["run"].dump() << " " << summary["config"].dump() << "\n";
                r.write_csv(os);
                if (!cfg.out.empty()) emit(summary);
                return 0;
            }
            emit(summary);
            return 0;
        } else if (*div) {
            const DivergenceReport r = divergence_experiment(dopt);
            out["config"] = cfg.to_json();
            out["config"].update({{"k_high", dopt.k_high}, {"K", dopt.depth_max}});
            out["report"] = r.to_json();
        } else if (*reg) {
            out["config"] = cfg.to_json();
            out["config"].update({{"k1", reg_k1}, {"density", reg_density}});
            out["sweep"] = region_sweep(reg_k1, reg_density).to_json();
            TermIIOptions t;
            t.k1 = reg_k1;
            t.seed = cfg.seed;
            out["term_II"] = term_II_kernel_check(t).to_json();
            if (reg_k1 >= 5) {
                const DecayRow d = region_decay(reg_k1);
                out["decay"] = {{"k1", d.k1}, {"term_I", d.term_I}, {"term_III", d.term_III}};
            }
        }
        emit(out);
        return 0;
    } catch (const ContractViolation& e) {
        std::cerr << "qslab: contract violation: " << e.what() << "\n";
        return 2;
    } catch (const NonConvergence& e) {
        std::cerr << "qslab: did not converge: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "qslab: " << e.what() << "\n";
        return 1;
    }
}

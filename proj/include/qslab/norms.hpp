#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qslab/grid.hpp"
#include "qslab/lp_frame.hpp"

namespace qslab {

enum class NormSpace { xk, fbar, hs, linf_l2, l1_l2 };

std::string to_string(NormSpace s);
NormSpace norm_space_from_string(const std::string& s);

struct ShellContribution {
    int k = 0;
    std::optional<int> j;
    double value = 0.0;
};

// For xk the total is the plain sum of shell values; for fbar it is their l2 sum.
struct NormBreakdown {
    NormSpace space = NormSpace::xk;
    double s = 0.0;
    int k = 0;
    int j_max = 0;
    double total = 0.0;
    double tail = 0.0;
    std::vector<ShellContribution> shells;

    nlohmann::json to_json() const;
};

inline constexpr double kSupportTolerance = 1e-10;
inline constexpr double kTailTolerance = 1e-8;

// Default modulation cap: largest j with 2^j <= max |sigma| on the lattice.
int default_j_max(const ModField& f);

// sum_j 2^{j/2} ||eta_j(sigma) f||_2 for f supported in frequency shell k.
NormBreakdown xk_norm(const ModField& f, int k, std::optional<int> j_max = {}, const lp::CutoffProfile& p = {});
NormBreakdown xk_norm(const Field& f, int k, std::optional<int> j_max = {}, const lp::CutoffProfile& p = {});

// (sum_{k>=1} 2^{2sk} ||eta_k F(u)||_{X_k}^2 + ||P_0 u||_{L^inf L^2}^2)^{1/2}.
// Each X_k sums every modulation shell the lattice reaches.
NormBreakdown fbar_norm(const Field& u, double s, const lp::CutoffProfile& p = {});
NormBreakdown fbar_norm(const ModField& comoving, double s, const lp::CutoffProfile& p = {});

double hs_norm(const InitialData& phi, double s);

double linf_l2(const Field& physical);
double linf_l2(const ModField& comoving);

// int ||f(., tau)||_{L^2_xi} dtau on the lab spectrum, and the same in the modulation variable.
double l1tau_l2xi(const Field& spectral);
double l1sigma_l2xi(const ModField& f);

}  // namespace qslab

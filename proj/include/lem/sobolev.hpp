#pragma once
// Weighted Sobolev embedding checks and truncated Rayleigh quotients.
//   B(r) = (int_0^r psi^{n-1})^{1/p} (int_r^inf psi^{1-n})^{1/2}
// decides continuity/compactness of H^1_psi -> L^p_psi; the truncated
// quotient I_R = inf ||f'||_{2,psi} / ||f||_{q+1,psi} over f(R)=0 is
// minimized by projected gradient descent on a graded mesh.

#include <cstdint>
#include <vector>

#include "lem/model.hpp"

namespace lem::sobolev {

double ko_functional(const manifold::Profile& p, int n, double pexp, double r);

enum class Verdict { continuous_and_compact, continuous_not_compact, not_continuous };
std::string verdict_name(Verdict v);

struct EmbeddingReport {
    double p = 0;
    double sup_B = 0;                 // +inf when unbounded
    double limit_0 = 0, limit_inf = 0;
    double slope_0 = 0, slope_inf = 0;  // fitted log-log end slopes of B
    Verdict verdict = Verdict::not_continuous;
    std::vector<double> r, B;
};
EmbeddingReport embedding_report(const manifold::Profile& p, int n, double pexp,
                                 double r_lo = 1e-4, double r_hi = 1e4, int per_decade = 32);

struct QuotientResult {
    double R = 0;
    double I_R = 0;
    std::vector<double> grid, minimizer;  // minimizer scaled to solve the EL equation with unit lambda
    double mass = 0;                      // int_0^R |f|^{q+1} psi^{n-1}
    int iterations = 0;
    bool converged = false;
};
QuotientResult rayleigh_minimize(const manifold::Profile& p, int n, double q, double R,
                                 int mesh_size = 512);

struct ScanResult {
    std::vector<QuotientResult> rows;
    double fitted_slope = 0;          // log I_R vs log R over the scan
    double last_doubling_change = 0;  // |I(2R)-I(R)|/I(R) for the last doubling present
};
ScanResult quotient_limit_scan(const manifold::Profile& p, int n, double q,
                               const std::vector<double>& R_list, int mesh_size = 512,
                               int threads = 0);

struct QuotientComparison {
    double I_psi = 0, I_alpha = 0;
    double err_psi = 0, err_alpha = 0;  // self-convergence error estimates
    bool strict_gap = false;            // I_alpha - I_psi > 3 * (err_psi + err_alpha)
};
// q must be the critical exponent two_star_alpha - 1 for (n, alpha)
QuotientComparison compare_quotients(const manifold::Profile& p, int n, double alpha,
                                     double kappa, double q, double R, int mesh_size = 512);

}  // namespace lem::sobolev

#pragma once
// First-zero branch a -> rho(a), its inversion A(R) = u_R(0), monotonicity
// violation scanning (the numeric witness of Dirichlet non-uniqueness), and
// ball Dirichlet solutions by bisection on the shooting height.

#include <optional>
#include <utility>
#include <vector>

#include "lem/shooting.hpp"

namespace lem::dirichlet {

struct BranchPoint {
    double a = 0;
    std::optional<double> rho;   // absent = no zero before r_max
    double u0_check = 0;         // |u(rho)|/a for present entries
    shooting::Event event = shooting::Event::reached_r_max;
};

struct DirichletBranch {
    manifold::ProfilePtr psi;
    int n = 0;
    double q = 0;
    double r_max = 0;
    shooting::Options options;
    std::vector<BranchPoint> points;                      // ascending a
    std::vector<std::pair<int, int>> monotone_violations; // (i, j): a_i < a_j, rho_i < rho_j (absent = +inf)
};

DirichletBranch branch_trace(manifold::ProfilePtr psi, int n, double q,
                             double a_min, double a_max, int count, double r_max,
                             const shooting::Options& opt = {}, int threads = 0);

struct NonUniqTriple {
    double R = 0, a1 = 0, a2 = 0;
};
// refines each violation into two heights with |rho(a1) - rho(a2)| < 1e-8;
// empty when the branch is strictly monotone (warning flag covers the
// absent-mid-entries case where no bracket exists)
std::vector<NonUniqTriple> detect_nonuniqueness(const DirichletBranch& branch,
                                                bool* bracket_warning = nullptr);

struct BallSolution {
    double R = 0;
    double a = 0;              // shooting height with rho(a) = R
    double mass = 0;           // int_0^R u^{q+1} psi^{n-1}
    double sobolev_quotient = 0;
    double zero_residual = 0;  // |u(rho)|/a
    shooting::Trajectory trajectory;
};
BallSolution dirichlet_solution(manifold::ProfilePtr psi, int n, double q, double R,
                                double a_lo, double a_hi,
                                const shooting::Options& opt = {});

struct ClaimsRow {
    double R = 0;
    double I_R = 0;        // truncated Rayleigh quotient
    double A_R = 0;        // u_R(0) from branch inversion (first root found)
    int root_count = 0;    // sign changes of rho(a) - R on the scan grid
    double mass = 0;
};
struct ClaimsReport {
    std::vector<ClaimsRow> rows;
    bool I_nonincreasing = false;
    bool A_decreasing = false;
    bool multivalued = false;   // some R with more than one root
    std::vector<std::string> violations;
};
ClaimsReport branch_claims_report(manifold::ProfilePtr psi, int n, double q,
                                  const std::vector<double>& R_list,
                                  double a_min = 1e-2, double a_max = 1e3,
                                  int scan_count = 48, int mesh_size = 512,
                                  const shooting::Options& opt = {});

}  // namespace lem::dirichlet

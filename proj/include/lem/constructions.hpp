#pragma once
// Explicit objects: the radial supersolution w = A/(B+r^2)^{1/(q-1)}, the
// exact power-decay tail w2 = c (r-r0)^{-2/(q-1)}, and the glued manifold
// pipeline: Lipschitz glue of the hyperbolic ball solution with w2, then a
// C^1 profile via the F = u^{-(q-1)} transform, then local mollification of
// F''' keeping the curvature functional positive. Each stage exposes native
// evaluators plus a tabulated profile snapshot for the downstream modules.

#include <memory>
#include <optional>

#include "lem/dirichlet.hpp"
#include "lem/interp.hpp"
#include "lem/model.hpp"

namespace lem::constructions {

struct Supersolution {
    int n = 0;
    double alpha = 0, q = 0;
    double A = 0, B = 0;
    double eps = 0, r_eps = 0;
    int rounds = 0;            // shrink/grow retries used
    double min_residual = 0;   // min of -w'' - (n-1)(psi'/psi)w' - w^q over the check grid

    double w(double r) const;
    double dw(double r) const;
};
Supersolution build_supersolution(const manifold::Profile& psi, int n, double alpha, double q,
                                  std::optional<double> eps = std::nullopt);
// standalone verifier (used to reject inflated constants)
double supersolution_min_residual(const manifold::Profile& psi, int n, double q,
                                  double A, double B,
                                  double r_lo = 1e-4, double r_hi = 1e4, int grid_pts = 4096);

struct W2Tail {
    int n = 0;
    double alpha = 0, q = 0;
    double r0 = 0;
    double c = 0;                  // [2/(q-1) (alpha(n-1) - (q+1)/(q-1))]^{1/(q-1)}
    double max_check_residual = 0; // residual of the defining ODE at 20 sample points

    double w(double r) const;      // r > r0
    double dw(double r) const;
    double ddw(double r) const;
};
W2Tail w2_tail(int n, double alpha, double q, double r0);

// Lipschitz stage: psi = sinh below r_bar, kappa (r - r_tilde)^alpha above;
// u = hyperbolic unit-ball solution w1 below r_bar, w2 above, tangent at r_bar
struct LipschitzGlue {
    int n = 0;
    double alpha = 0, q = 0;
    double r_tilde = 0, r_bar = 0;
    double kappa = 0, c = 0;
    double a_ball = 0;             // u(0) = w1(0)
    double tangency_gap = 0;       // |w1 - w2| at r_bar
    double slope_gap = 0;          // |w1' - w2'| at r_bar, relative
    double curvature_jump = 0;     // w2'' - w1'' at r_bar
    interp::HermiteTable w1;       // ball solution samples on [eps0, 1]
    W2Tail w2;
    manifold::ProfilePtr psi_bar;

    double u(double r) const;
    double du(double r) const;
};
LipschitzGlue glue(int n, double alpha, double q);

// C^1 / C^inf stages share one representation built around F = u^{-(q-1)}
class SmoothProfile {
  public:
    int n = 0;
    double alpha = 0, q = 0;
    double r_tilde = 0, r_bar = 0;
    double eps = 0;        // span of the cubic correction piece
    double width = 0;      // mollification blend half-width (0 = C^1 stage)
    double A = 0, B = 0, C = 0, A_tilde = 0;  // F2 coefficients and F1''(r_bar)
    double K = 0;          // achieved constant in psi''/psi >= K/(r^2+1)
    double min_G = 0;      // min of the curvature functional over the check grid
    double kappa_tail = 0; // re-estimated tail constant of this stage

    double u(double r) const;
    double du(double r) const;
    double ddu(double r) const;
    double psi(double r) const;
    double dpsi(double r) const;
    double ddpsi(double r) const;
    // curvature functional from the F jets; equals (n-1)^2 psi''/psi
    double G_value(double r) const;
    double F(double r) const;
    double dF(double r) const;
    double ddF(double r) const;
    double dddF(double r) const;

    double jump1() const { return r_bar; }
    double jump2() const { return r_bar + eps; }

    manifold::ProfilePtr tabulated(double r_max = 1.2e4) const;

    struct Impl;
    std::shared_ptr<const Impl> impl;
};

SmoothProfile smooth_c1(const LipschitzGlue& g, std::optional<double> eps = std::nullopt);
SmoothProfile smooth_cinf(const SmoothProfile& c1, std::optional<double> width = std::nullopt);

// whole pipeline in one call
struct GluedArtifact {
    LipschitzGlue lip;
    SmoothProfile c1;
    SmoothProfile final;
    manifold::ProfilePtr psi_final;  // tabulated snapshot of final.psi
};
GluedArtifact build_glued_manifold(int n, double alpha, double q);

}  // namespace lem::constructions

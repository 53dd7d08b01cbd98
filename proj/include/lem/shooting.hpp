#pragma once
// Radial Cauchy problem  -(psi^{n-1} u')' = psi^{n-1} |u|^{q-1} u,
// u(0) = a, u'(0) = 0, integrated as  u'' = -(n-1)(psi'/psi) u' - |u|^{q-1} u
// from a two-term series start at eps0, with first-zero event refinement on
// dense output, blow-up and step-underflow detection.

#include <optional>
#include <vector>

#include "lem/model.hpp"

namespace lem::shooting {

struct CauchyProblem {
    manifold::ProfilePtr psi;
    int n = 3;
    double q = 2;
    double a = 1;
};

enum class Event { first_zero, reached_r_max, blow_up, step_underflow };
std::string event_name(Event e);

struct Options {
    double rtol = 1e-10;
    double atol = 1e-12;           // scaled internally by max(1, a)
    double eps0 = 1e-6;            // series-start radius
    double blow_up_threshold = 1e12;
    int samples_hint = 2000;       // target count of stored samples
    bool continue_past_zero = false;
};

struct Trajectory {
    CauchyProblem problem;
    std::vector<double> r, u, du;
    Event event = Event::reached_r_max;
    double r_event = 0;            // rho for first_zero, else the radius reached
    double rtol = 0, atol = 0;
    std::vector<double> zeros;     // all refined zeros seen (>=1 entry iff a zero was crossed)

    double u_at(double r) const;   // cubic Hermite through (u, du) samples
    double du_at(double r) const;
};

Trajectory integrate_cauchy(const CauchyProblem& problem, double r_max, const Options& opt = {});

// refined first zero if the trajectory terminates with one; refinement
// contract |u(rho)| < 1e-10 * a
std::optional<double> first_zero(const CauchyProblem& problem, double r_max, const Options& opt = {});

// max over interior samples of |u''_fd + (n-1)(psi'/psi)u' + |u|^{q-1}u|
// normalized by max(1, |u|^q); u''_fd by 3-point differences on the stored grid
double residual(const Trajectory& t);

struct DecayFit {
    double exponent_u = 0, exponent_du = 0;
    double r_lo = 0, r_hi = 0;
    double rms_u = 0, rms_du = 0;
};
DecayFit decay_fit(const Trajectory& t, double r_lo, double r_hi);

}  // namespace lem::shooting

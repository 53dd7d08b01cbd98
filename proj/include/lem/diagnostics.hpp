#pragma once
// Energy and Pohozaev functions along trajectories:
//   F(r) = u'^2/2 + |u|^{q+1}/(q+1)
//   P(r) = (int_0^r psi^{n-1}) F(r) + psi^{n-1} u u'/(q+1)
//   P'(r) = rate(r) |u'|^2,  rate = psi^{n-1}(1/2 + 1/(q+1)
//           - (n-1) psi' psi^{-n} int_0^r psi^{n-1})
// plus the tail amplitude estimates of slowly decaying global solutions.

#include <vector>

#include "lem/shooting.hpp"

namespace lem::diagnostics {

struct PohozaevTrace {
    std::vector<double> r, F, P, rate, cumvol;
    std::vector<double> du2;   // |u'|^2 alongside, for the identity check
    int n = 0;
    double q = 0;
};

PohozaevTrace pohozaev(const shooting::Trajectory& t);

// max over interior points of |dP/dr (central) - rate*|u'|^2|, normalized by
// max(1, max|P|); needs >= 9 points
double rate_identity(const PohozaevTrace& tr);

// min consecutive increment of P, normalized by max|P| (for monotonicity checks)
double min_increment(const PohozaevTrace& tr);

struct AmplitudeLimit {
    double L = 0;           // tail average of r^{(alpha(n-1)-1)/2} u
    double Lprime = 0;      // tail average of r^{(alpha(n-1)+1)/2} |u'|
    double relation_residual = 0;  // |L^{2*_alpha - 2} - ((alpha(n-1)-1)/2)^2|
    int tail_samples = 0;
};
// alpha defaults to the profile's declared value; refuses exponential profiles
AmplitudeLimit amplitude_limit(const shooting::Trajectory& t, double alpha = 0.0);

struct SummandDecay {
    double e_kinetic = 0, e_potential = 0, e_boundary = 0;  // fitted slopes of the three P summands
    double predicted = 0;  // alpha(n-1)+1 - 2(q+1)/(q-1)
};
SummandDecay summand_decay(const PohozaevTrace& tr, const shooting::Trajectory& t,
                           double alpha, double r_lo, double r_hi);

}  // namespace lem::diagnostics

#pragma once
// Small closed-form least-squares fits (line, quadratic, two-term power pair)
// and trimmed tail averaging. No linear-algebra library needed: the largest
// normal system here is 3x3.

#include <cstddef>
#include <vector>

namespace lem::fit {

struct LineFit {
    double slope = 0, intercept = 0, rms = 0;
};

LineFit linear(const std::vector<double>& x, const std::vector<double>& y);
// fits log y = slope*log x + intercept; requires x, y > 0
LineFit loglog(const std::vector<double>& x, const std::vector<double>& y);

struct QuadFit {
    double c0 = 0, c1 = 0, c2 = 0;   // y ~ c0 + c1*(x-x0) + c2*(x-x0)^2
    double rms = 0;
};
QuadFit quadratic(const std::vector<double>& x, const std::vector<double>& y, double x0);

struct PowerPairFit {
    double a1 = 0, a2 = 0;           // y ~ a1*x^e1 + a2*x^e2
    double rel_residual = 0;         // RMS residual / RMS of y
};
PowerPairFit power_pair(const std::vector<double>& x, const std::vector<double>& y,
                        double e1, double e2);

// geometric mean with the top and bottom trim_frac of samples dropped;
// requires positive samples
double trimmed_geomean(std::vector<double> samples, double trim_frac = 0.05);

}  // namespace lem::fit

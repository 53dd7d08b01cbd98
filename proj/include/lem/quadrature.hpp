#pragma once
// Adaptive Simpson quadrature plus cumulative (per-interval) integration over
// fixed grids. Everything here is deterministic and single-threaded.

#include <functional>
#include <vector>

namespace lem::quadrature {

using Fn = std::function<double(double)>;

// adaptive Simpson with Richardson correction; splits until the local
// estimate satisfies |S2-S1| <= 15*(abs_tol + rel_tol*|S2|) or max_depth
double integrate(const Fn& f, double a, double b,
                 double rel_tol = 1e-12, double abs_tol = 0.0, int max_depth = 52);

// cumulative integral at the grid nodes: out[i] = c0 + int_{r[0]}^{r[i]} f,
// one composite-Simpson cell per grid interval (two f evals per interval)
std::vector<double> cumulative(const Fn& f, const std::vector<double>& r, double c0 = 0.0);

// closed form of int_R^inf (kappa * s^alpha)^(1-n) ds for alpha*(n-1) > 1
double power_tail(double kappa, double alpha, int n, double R);

}  // namespace lem::quadrature

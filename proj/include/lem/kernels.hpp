#pragma once
// Data-parallel primitives used by the grid-heavy inner loops (quotient
// minimization, condition margins, tail fits). Scalar reference versions are
// the semantic ground truth; AVX2/NEON variants are selected once at runtime
// and must agree with scalar to accumulation-order tolerance.

#include <cstddef>
#include <string>

namespace lem::kernels {

enum class Lane { scalar, avx2, neon };

Lane active_lane();                 // lane chosen by cpu detection (or LEM_KERNELS env override)
void force_lane(Lane lane);         // throws if the lane is not compiled in / not supported
bool lane_available(Lane lane);
std::string lane_name(Lane lane);

// sum_i x[i]*y[i]
double dot(const double* x, const double* y, std::size_t n);
// sum_i x[i]
double sum(const double* x, std::size_t n);
// sum_i w[i] * (f[i+1] - f[i])^2, i in [0, m)  (f has m+1 entries)
double weighted_diff_sq_sum(const double* f, const double* w, std::size_t m);
// sum_i m[i] * |f[i]|^p; p an integer >= 1 hits the vector path, otherwise scalar pow
double pow_mass(const double* f, const double* m, std::size_t n, double p);
// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);
// z[i] = a*x[i] + b*y[i]
void axpby(double a, const double* x, double b, const double* y, double* z, std::size_t n);
// x[i] *= a
void scale(double a, double* x, std::size_t n);
// x[i] = |x[i]|
void abs_inplace(double* x, std::size_t n);
// index of the minimum entry (first occurrence)
std::size_t argmin(const double* x, std::size_t n);
double min_value(const double* x, std::size_t n);

// per-lane entry points, exposed for equivalence tests
namespace detail {
struct Ops {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*weighted_diff_sq_sum)(const double*, const double*, std::size_t);
    double (*pow_mass_int)(const double*, const double*, std::size_t, long);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*axpby)(double, const double*, double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    void (*abs_inplace)(double*, std::size_t);
};
const Ops& ops_for(Lane lane);      // throws on unavailable lane
}  // namespace detail

}  // namespace lem::kernels

#include "lem/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace lem::kernels {

namespace {

double s_dot(const double* x, const double* y, std::size_t n) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double s_sum(const double* x, std::size_t n) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double s_wdss(const double* f, const double* w, std::size_t m) {
    double acc = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double d = f[i + 1] - f[i];
        acc += w[i] * d * d;
    }
    return acc;
}

double s_pow_mass_int(const double* f, const double* m, std::size_t n, long p) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = std::abs(f[i]), v = 1.0;
        for (long k = 0; k < p; ++k) v *= a;
        acc += m[i] * v;
    }
    return acc;
}

void s_axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void s_axpby(double a, const double* x, double b, const double* y, double* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

void s_scale(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void s_abs(double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::abs(x[i]);
}

constexpr detail::Ops scalar_ops{s_dot, s_sum, s_wdss, s_pow_mass_int,
                                 s_axpy, s_axpby, s_scale, s_abs};

Lane detect_lane() {
    if (const char* env = std::getenv("LEM_KERNELS")) {
        std::string v(env);
        if (v == "scalar") return Lane::scalar;
        if (v == "avx2" && lane_available(Lane::avx2)) return Lane::avx2;
        if (v == "neon" && lane_available(Lane::neon)) return Lane::neon;
    }
#if defined(LEM_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2")) return Lane::avx2;
#endif
#if defined(LEM_HAVE_NEON)
    return Lane::neon;
#endif
    return Lane::scalar;
}

Lane& current_lane() {
    static Lane lane = detect_lane();
    return lane;
}

}  // namespace

#if defined(LEM_HAVE_AVX2)
namespace detail {
const Ops& avx2_ops();  // kernels_avx2.cpp
}
#endif
#if defined(LEM_HAVE_NEON)
namespace detail {
const Ops& neon_ops();  // kernels_neon.cpp
}
#endif

namespace detail {
const Ops& ops_for(Lane lane) {
    switch (lane) {
        case Lane::scalar:
            return scalar_ops;
#if defined(LEM_HAVE_AVX2)
        case Lane::avx2:
            if (__builtin_cpu_supports("avx2")) return avx2_ops();
            break;
#endif
#if defined(LEM_HAVE_NEON)
        case Lane::neon:
            return neon_ops();
#endif
        default:
            break;
    }
    throw std::runtime_error("kernel lane not available: " + lane_name(lane));
}
}  // namespace detail

Lane active_lane() { return current_lane(); }

bool lane_available(Lane lane) {
    if (lane == Lane::scalar) return true;
#if defined(LEM_HAVE_AVX2)
    if (lane == Lane::avx2) return __builtin_cpu_supports("avx2");
#endif
#if defined(LEM_HAVE_NEON)
    if (lane == Lane::neon) return true;
#endif
    return false;
}

void force_lane(Lane lane) {
    if (!lane_available(lane)) throw std::runtime_error("kernel lane not available: " + lane_name(lane));
    current_lane() = lane;
}

std::string lane_name(Lane lane) {
    switch (lane) {
        case Lane::scalar: return "scalar";
        case Lane::avx2: return "avx2";
        case Lane::neon: return "neon";
    }
    return "?";
}

namespace {
const detail::Ops& ops() { return detail::ops_for(current_lane()); }
}

double dot(const double* x, const double* y, std::size_t n) { return ops().dot(x, y, n); }
double sum(const double* x, std::size_t n) { return ops().sum(x, n); }
double weighted_diff_sq_sum(const double* f, const double* w, std::size_t m) {
    return ops().weighted_diff_sq_sum(f, w, m);
}

double pow_mass(const double* f, const double* m, std::size_t n, double p) {
    long ip = std::lround(p);
    if (ip >= 1 && ip <= 64 && p == static_cast<double>(ip))
        return ops().pow_mass_int(f, m, n, ip);
    double acc = 0;  // non-integer exponent: scalar libm path on every lane
    for (std::size_t i = 0; i < n; ++i) acc += m[i] * std::pow(std::abs(f[i]), p);
    return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) { ops().axpy(a, x, y, n); }
void axpby(double a, const double* x, double b, const double* y, double* z, std::size_t n) {
    ops().axpby(a, x, b, y, z, n);
}
void scale(double a, double* x, std::size_t n) { ops().scale(a, x, n); }
void abs_inplace(double* x, std::size_t n) { ops().abs_inplace(x, n); }

std::size_t argmin(const double* x, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] < x[best]) best = i;
    return best;
}

double min_value(const double* x, std::size_t n) { return x[argmin(x, n)]; }

}  // namespace lem::kernels

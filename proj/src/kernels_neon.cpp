// NEON kernel lane (aarch64, 2-wide f64). Baseline on aarch64, no extra
// compile flags needed.

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

#include "lem/kernels.hpp"

namespace lem::kernels::detail {
namespace {

double v_dot(const double* x, const double* y, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double v_sum(const double* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double v_wdss(const double* f, const double* w, std::size_t m) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= m; i += 2) {
        float64x2_t d = vsubq_f64(vld1q_f64(f + i + 1), vld1q_f64(f + i));
        acc = vfmaq_f64(acc, vmulq_f64(d, d), vld1q_f64(w + i));
    }
    double s = vaddvq_f64(acc);
    for (; i < m; ++i) {
        double d = f[i + 1] - f[i];
        s += w[i] * d * d;
    }
    return s;
}

double v_pow_mass_int(const double* f, const double* m, std::size_t n, long p) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t a = vabsq_f64(vld1q_f64(f + i));
        float64x2_t v = vdupq_n_f64(1.0);
        for (long k = 0; k < p; ++k) v = vmulq_f64(v, a);
        acc = vfmaq_f64(acc, v, vld1q_f64(m + i));
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) {
        double a = std::abs(f[i]), v = 1.0;
        for (long k = 0; k < p; ++k) v *= a;
        s += m[i] * v;
    }
    return s;
}

void v_axpy(double a, const double* x, double* y, std::size_t n) {
    float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void v_axpby(double a, const double* x, double b, const double* y, double* z, std::size_t n) {
    float64x2_t va = vdupq_n_f64(a), vb = vdupq_n_f64(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t t = vmulq_f64(vb, vld1q_f64(y + i));
        vst1q_f64(z + i, vfmaq_f64(t, va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

void v_scale(double a, double* x, std::size_t n) {
    float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void v_abs(double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vabsq_f64(vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] = std::abs(x[i]);
}

}  // namespace

const Ops& neon_ops() {
    static const Ops ops{v_dot, v_sum, v_wdss, v_pow_mass_int, v_axpy, v_axpby, v_scale, v_abs};
    return ops;
}

}  // namespace lem::kernels::detail

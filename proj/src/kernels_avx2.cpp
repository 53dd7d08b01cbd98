// AVX2 kernel lane. This TU is the only one compiled with -mavx2 -mfma; it is
// entered only after a runtime cpu check. Horizontal reductions use a fixed
// lane order so results are deterministic run-to-run.

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "lem/kernels.hpp"

namespace lem::kernels::detail {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double v_dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double v_sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double v_wdss(const double* f, const double* w, std::size_t m) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(f + i + 1), _mm256_loadu_pd(f + i));
        acc = _mm256_fmadd_pd(_mm256_mul_pd(d, d), _mm256_loadu_pd(w + i), acc);
    }
    double s = hsum(acc);
    for (; i < m; ++i) {
        double d = f[i + 1] - f[i];
        s += w[i] * d * d;
    }
    return s;
}

double v_pow_mass_int(const double* f, const double* m, std::size_t n, long p) {
    const __m256d signmask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_andnot_pd(signmask, _mm256_loadu_pd(f + i));
        __m256d v = _mm256_set1_pd(1.0);
        for (long k = 0; k < p; ++k) v = _mm256_mul_pd(v, a);
        acc = _mm256_fmadd_pd(v, _mm256_loadu_pd(m + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double a = std::abs(f[i]), v = 1.0;
        for (long k = 0; k < p; ++k) v *= a;
        s += m[i] * v;
    }
    return s;
}

void v_axpy(double a, const double* x, double* y, std::size_t n) {
    __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void v_axpby(double a, const double* x, double b, const double* y, double* z, std::size_t n) {
    __m256d va = _mm256_set1_pd(a), vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(z + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), t));
    }
    for (; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

void v_scale(double a, double* x, std::size_t n) {
    __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void v_abs(double* x, std::size_t n) {
    const __m256d signmask = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_andnot_pd(signmask, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] = std::abs(x[i]);
}

}  // namespace

const Ops& avx2_ops() {
    static const Ops ops{v_dot, v_sum, v_wdss, v_pow_mass_int, v_axpy, v_axpby, v_scale, v_abs};
    return ops;
}

}  // namespace lem::kernels::detail

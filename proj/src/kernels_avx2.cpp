#include "pisco/kernels.hpp"

// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma;
// nothing here may run unless avx2::available() returned true.

#if defined(__x86_64__) || defined(_M_X64)
#define PISCO_HAVE_AVX2_TU 1
#include <immintrin.h>
#else
#define PISCO_HAVE_AVX2_TU 0
#endif

namespace pisco::kernels::avx2 {

#if PISCO_HAVE_AVX2_TU

namespace {

// Reduction order is fixed (acc0..acc3 pairwise, then lanes left to right)
// so repeated runs on the same machine are bit-identical.
inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sumsq_(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d a = _mm256_loadu_pd(x + i);
        const __m256d b = _mm256_loadu_pd(x + i + 4);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
        acc1 = _mm256_fmadd_pd(b, b, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(x + i);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

double sumsq_diff_(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

void axpy_(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scal_(double a, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void add_diff_(double* y, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), d));
    }
    for (; i < n; ++i) y[i] += a[i] - b[i];
}

void lincomb3_(double* out, double c1, const double* x1, double c2, const double* x2,
               double c3, const double* x3, std::size_t n) {
    const __m256d v1 = _mm256_set1_pd(c1);
    const __m256d v2 = _mm256_set1_pd(c2);
    const __m256d v3 = _mm256_set1_pd(c3);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_mul_pd(v1, _mm256_loadu_pd(x1 + i));
        r = _mm256_fmadd_pd(v2, _mm256_loadu_pd(x2 + i), r);
        r = _mm256_fmadd_pd(v3, _mm256_loadu_pd(x3 + i), r);
        _mm256_storeu_pd(out + i, r);
    }
    for (; i < n; ++i) out[i] = c1 * x1[i] + c2 * x2[i] + c3 * x3[i];
}

}  // namespace

const Ops ops = {dot_, sumsq_, sumsq_diff_, axpy_, scal_, add_diff_, lincomb3_};

bool available() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

#else

const Ops ops = scalar::ops;

bool available() { return false; }

#endif

}  // namespace pisco::kernels::avx2

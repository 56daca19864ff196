// AVX2+FMA kernel variants. Compiled with per-function target attributes so
// the translation unit builds on any x86 toolchain; the dispatcher only
// calls in after a cpuid check.

#include "latentkit/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#if defined(__GNUC__) || defined(__clang__)
#define LK_TARGET_AVX2 __attribute__((target("avx2,fma")))
#else
#define LK_TARGET_AVX2
#endif

namespace latentkit::kernels::avx2 {

bool host_supported() {
#if defined(__GNUC__) || defined(__clang__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

LK_TARGET_AVX2 inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

} // namespace

LK_TARGET_AVX2
double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double total = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

LK_TARGET_AVX2
double sum(const double* a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    double total = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) total += a[i];
    return total;
}

LK_TARGET_AVX2
double sumsq(const double* a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d v0 = _mm256_loadu_pd(a + i);
        __m256d v1 = _mm256_loadu_pd(a + i + 4);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
        acc1 = _mm256_fmadd_pd(v1, v1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(a + i);
        acc0 = _mm256_fmadd_pd(v, v, acc0);
    }
    double total = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) total += a[i] * a[i];
    return total;
}

LK_TARGET_AVX2
double sqdist(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double total = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        total += d * d;
    }
    return total;
}

LK_TARGET_AVX2
BivariateSums bivariate_sums(const double* x, const double* y, std::size_t n) {
    __m256d sx = _mm256_setzero_pd();
    __m256d sy = _mm256_setzero_pd();
    __m256d sxx = _mm256_setzero_pd();
    __m256d syy = _mm256_setzero_pd();
    __m256d sxy = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d vy = _mm256_loadu_pd(y + i);
        sx = _mm256_add_pd(sx, vx);
        sy = _mm256_add_pd(sy, vy);
        sxx = _mm256_fmadd_pd(vx, vx, sxx);
        syy = _mm256_fmadd_pd(vy, vy, syy);
        sxy = _mm256_fmadd_pd(vx, vy, sxy);
    }
    BivariateSums s;
    s.sx = hsum(sx);
    s.sy = hsum(sy);
    s.sxx = hsum(sxx);
    s.syy = hsum(syy);
    s.sxy = hsum(sxy);
    for (; i < n; ++i) {
        s.sx += x[i];
        s.sy += y[i];
        s.sxx += x[i] * x[i];
        s.syy += y[i] * y[i];
        s.sxy += x[i] * y[i];
    }
    return s;
}

} // namespace latentkit::kernels::avx2

#endif // x86

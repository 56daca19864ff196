// NEON kernel variants for AArch64 hosts.

#include "latentkit/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace latentkit::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    double total = vaddvq_f64(acc);
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

double sum(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
    double total = vaddvq_f64(acc);
    for (; i < n; ++i) total += a[i];
    return total;
}

double sumsq(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vld1q_f64(a + i);
        acc = vfmaq_f64(acc, v, v);
    }
    double total = vaddvq_f64(acc);
    for (; i < n; ++i) total += a[i] * a[i];
    return total;
}

double sqdist(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        acc = vfmaq_f64(acc, d, d);
    }
    double total = vaddvq_f64(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        total += d * d;
    }
    return total;
}

BivariateSums bivariate_sums(const double* x, const double* y, std::size_t n) {
    float64x2_t sx = vdupq_n_f64(0.0);
    float64x2_t sy = vdupq_n_f64(0.0);
    float64x2_t sxx = vdupq_n_f64(0.0);
    float64x2_t syy = vdupq_n_f64(0.0);
    float64x2_t sxy = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vx = vld1q_f64(x + i);
        float64x2_t vy = vld1q_f64(y + i);
        sx = vaddq_f64(sx, vx);
        sy = vaddq_f64(sy, vy);
        sxx = vfmaq_f64(sxx, vx, vx);
        syy = vfmaq_f64(syy, vy, vy);
        sxy = vfmaq_f64(sxy, vx, vy);
    }
    BivariateSums s;
    s.sx = vaddvq_f64(sx);
    s.sy = vaddvq_f64(sy);
    s.sxx = vaddvq_f64(sxx);
    s.syy = vaddvq_f64(syy);
    s.sxy = vaddvq_f64(sxy);
    for (; i < n; ++i) {
        s.sx += x[i];
        s.sy += y[i];
        s.sxx += x[i] * x[i];
        s.syy += y[i] * y[i];
        s.sxy += x[i] * y[i];
    }
    return s;
}

} // namespace latentkit::kernels::neon

#endif // __aarch64__

#include "latentkit/kernels.hpp"

#include <atomic>

namespace latentkit::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum(const double* a, std::size_t n) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

double sumsq(const double* a, std::size_t n) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

double sqdist(const double* a, const double* b, std::size_t n) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

BivariateSums bivariate_sums(const double* x, const double* y, std::size_t n) {
    BivariateSums s;
    for (std::size_t i = 0; i < n; ++i) {
        s.sx += x[i];
        s.sy += y[i];
        s.sxx += x[i] * x[i];
        s.syy += y[i] * y[i];
        s.sxy += x[i] * y[i];
    }
    return s;
}

} // namespace scalar

struct Vtable {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*sumsq)(const double*, std::size_t);
    double (*sqdist)(const double*, const double*, std::size_t);
    BivariateSums (*bivariate_sums)(const double*, const double*, std::size_t);
};

namespace {

constexpr Vtable scalar_vtable{scalar::dot, scalar::sum, scalar::sumsq, scalar::sqdist,
                               scalar::bivariate_sums};

} // namespace

#if defined(__x86_64__) || defined(__i386__)
namespace avx2 {
double dot(const double*, const double*, std::size_t);
double sum(const double*, std::size_t);
double sumsq(const double*, std::size_t);
double sqdist(const double*, const double*, std::size_t);
BivariateSums bivariate_sums(const double*, const double*, std::size_t);
bool host_supported();
} // namespace avx2
namespace {
const Vtable avx2_vtable{avx2::dot, avx2::sum, avx2::sumsq, avx2::sqdist, avx2::bivariate_sums};
}
#endif

#if defined(__aarch64__)
namespace neon {
double dot(const double*, const double*, std::size_t);
double sum(const double*, std::size_t);
double sumsq(const double*, std::size_t);
double sqdist(const double*, const double*, std::size_t);
BivariateSums bivariate_sums(const double*, const double*, std::size_t);
} // namespace neon
namespace {
const Vtable neon_vtable{neon::dot, neon::sum, neon::sumsq, neon::sqdist, neon::bivariate_sums};
}
#endif

namespace {

struct Selection {
    const Vtable* vt;
    Backend which;
};

Selection detect() {
#if defined(__x86_64__) || defined(__i386__)
    if (avx2::host_supported()) return {&avx2_vtable, Backend::avx2};
#endif
#if defined(__aarch64__)
    return {&neon_vtable, Backend::neon};
#endif
    return {&scalar_vtable, Backend::scalar};
}

std::atomic<const Vtable*> g_vt{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

const Vtable& vt() {
    const Vtable* p = g_vt.load(std::memory_order_acquire);
    if (!p) {
        Selection s = detect();
        g_backend.store(s.which, std::memory_order_relaxed);
        g_vt.store(s.vt, std::memory_order_release);
        p = s.vt;
    }
    return *p;
}

} // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

Backend active_backend() {
    vt();
    return g_backend.load(std::memory_order_relaxed);
}

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2:
#if defined(__x86_64__) || defined(__i386__)
            return avx2::host_supported();
#else
            return false;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

bool set_backend(Backend b) {
    if (!backend_supported(b)) return false;
    const Vtable* p = &scalar_vtable;
#if defined(__x86_64__) || defined(__i386__)
    if (b == Backend::avx2) p = &avx2_vtable;
#endif
#if defined(__aarch64__)
    if (b == Backend::neon) p = &neon_vtable;
#endif
    g_backend.store(b, std::memory_order_relaxed);
    g_vt.store(p, std::memory_order_release);
    return true;
}

double dot(const double* a, const double* b, std::size_t n) { return vt().dot(a, b, n); }
double sum(const double* a, std::size_t n) { return vt().sum(a, n); }
double sumsq(const double* a, std::size_t n) { return vt().sumsq(a, n); }
double sqdist(const double* a, const double* b, std::size_t n) { return vt().sqdist(a, b, n); }
BivariateSums bivariate_sums(const double* x, const double* y, std::size_t n) {
    return vt().bivariate_sums(x, y, n);
}

} // namespace latentkit::kernels

#pragma once

#include <cstddef>
#include <string>

// Data-parallel accumulation kernels behind the statistics layers.
// Every kernel has a scalar reference implementation; on x86 an AVX2+FMA
// variant and on AArch64 a NEON variant are selected at runtime when the
// host supports them. The variants are equivalence-tested against the
// scalar reference (floating-point sums may differ by reassociation only).

namespace latentkit::kernels {

struct BivariateSums {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
};

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sumsq(const double* a, std::size_t n);
// Squared Euclidean distance between two length-n rows.
double sqdist(const double* a, const double* b, std::size_t n);
// One-pass sums for a Pearson correlation cell.
BivariateSums bivariate_sums(const double* x, const double* y, std::size_t n);

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);
Backend active_backend();
bool backend_supported(Backend b);
// Forces a backend; returns false (and leaves the selection unchanged)
// when the host cannot run it.
bool set_backend(Backend b);

// Scalar reference implementations, always available; the equivalence
// tests compare the dispatched kernels against these.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sumsq(const double* a, std::size_t n);
double sqdist(const double* a, const double* b, std::size_t n);
BivariateSums bivariate_sums(const double* x, const double* y, std::size_t n);
} // namespace scalar

} // namespace latentkit::kernels

#include "latentkit/distributions.hpp"

#include "latentkit/common.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace latentkit::dist {

namespace {

constexpr double tiny = 1e-300;
constexpr double eps = 1e-15;
constexpr int max_iter = 500;

// Series expansion of P(a,x), valid for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double total = term;
    for (int i = 0; i < max_iter; ++i) {
        ap += 1.0;
        term *= x / ap;
        total += term;
        if (std::fabs(term) < std::fabs(total) * eps) break;
    }
    return total * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x), valid for x >= a+1 (modified Lentz).
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_iter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < eps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < eps) break;
    }
    return h;
}

} // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double normal_ppf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        fail(errc::domain_error, "normal_ppf requires p in [0,1]");
    }
    // Acklam's rational approximation, then one Halley step.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) fail(errc::domain_error, "gamma_p requires a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) fail(errc::domain_error, "gamma_q requires a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double beta_inc(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) fail(errc::domain_error, "beta_inc requires a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double chi2_cdf(double x, double df) {
    if (df <= 0.0) fail(errc::domain_error, "chi2_cdf requires df > 0");
    if (x <= 0.0) return 0.0;
    return gamma_p(df / 2.0, x / 2.0);
}

double chi2_sf(double x, double df) {
    if (df <= 0.0) fail(errc::domain_error, "chi2_sf requires df > 0");
    if (x <= 0.0) return 1.0;
    return gamma_q(df / 2.0, x / 2.0);
}

double t_cdf(double t, double df) {
    if (df <= 0.0) fail(errc::domain_error, "t_cdf requires df > 0");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double half_tail = 0.5 * beta_inc(df / 2.0, 0.5, x);
    return t <= 0.0 ? half_tail : 1.0 - half_tail;
}

double t_sf(double t, double df) { return t_cdf(-t, df); }

double t_two_sided_p(double t, double df) {
    if (df <= 0.0) fail(errc::domain_error, "t_two_sided_p requires df > 0");
    if (std::isinf(t)) return 0.0;
    return beta_inc(df / 2.0, 0.5, df / (df + t * t));
}

double t_ppf(double p, double df) {
    if (df <= 0.0) fail(errc::domain_error, "t_ppf requires df > 0");
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        fail(errc::domain_error, "t_ppf requires p in [0,1]");
    }
    if (p == 0.5) return 0.0;
    // Bisection from a normal-quantile bracket; the CDF is monotone.
    double lo = normal_ppf(p), hi = lo;
    if (p > 0.5) {
        lo = 0.0;
        if (hi <= 0.0) hi = 1.0;
        while (t_cdf(hi, df) < p) hi *= 2.0;
    } else {
        hi = 0.0;
        if (lo >= 0.0) lo = -1.0;
        while (t_cdf(lo, df) > p) lo *= 2.0;
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (t_cdf(mid, df) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-14 * (1.0 + std::fabs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

double f_cdf(double x, double df1, double df2) {
    if (df1 <= 0.0 || df2 <= 0.0) fail(errc::domain_error, "f_cdf requires df > 0");
    if (x <= 0.0) return 0.0;
    return beta_inc(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2));
}

double f_sf(double x, double df1, double df2) {
    if (df1 <= 0.0 || df2 <= 0.0) fail(errc::domain_error, "f_sf requires df > 0");
    if (x <= 0.0) return 1.0;
    return beta_inc(df2 / 2.0, df1 / 2.0, df2 / (df1 * x + df2));
}

} // namespace latentkit::dist

#pragma once

// Distribution functions used by the inference layer. Incomplete gamma and
// beta are evaluated by series/continued-fraction expansions (modified
// Lentz); accuracy target is 1e-10 relative, checked against tabulated
// reference values in docs/distribution-reference.md.

namespace latentkit::dist {

double normal_cdf(double x);
double normal_sf(double x);
double normal_ppf(double p);

// Regularized incomplete gamma P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a,b).
double beta_inc(double a, double b, double x);

double chi2_cdf(double x, double df);
double chi2_sf(double x, double df);

double t_cdf(double t, double df);
double t_sf(double t, double df);
double t_two_sided_p(double t, double df);
double t_ppf(double p, double df);

double f_cdf(double x, double df1, double df2);
double f_sf(double x, double df1, double df2);

} // namespace latentkit::dist

#pragma once

namespace skgp::studentt {

// Regularized incomplete beta function I_x(a, b), a, b > 0, x in [0, 1].
// Continued-fraction evaluation, absolute error well below 1e-12.
double reg_incomplete_beta(double a, double b, double x);

// Log density of the scaled t distribution with df degrees of freedom,
// location loc and scale s (> 0).
double log_pdf(double x, double df, double loc = 0.0, double scale = 1.0);

// CDF of the standard t distribution, absolute error <= 1e-10.
double cdf_standard(double t, double df);

double cdf(double x, double df, double loc = 0.0, double scale = 1.0);

}  // namespace skgp::studentt

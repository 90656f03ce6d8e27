#pragma once

namespace mrseg {

// Standard normal CDF.
double norm_cdf(double x);

// Standard normal quantile, p in (0,1).
double norm_ppf(double p);

// Upper-tail probability of Student's t with nu degrees of freedom.
double t_sf(double t, double nu);

// Regularized incomplete beta I_x(a, b).
double inc_beta(double a, double b, double x);

}  // namespace mrseg

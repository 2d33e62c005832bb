#pragma once

namespace csd {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF, accurate in both tails (erfc-based).
double normal_cdf(double x);

/// Inverse standard normal CDF; relative error below 1e-14 on (0,1).
double normal_quantile(double p);

}  // namespace csd

#pragma once

namespace sharpiv {

/// Standard normal density.
double normal_pdf(double x);
/// Standard normal distribution function.
double normal_cdf(double x);
/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

double expit(double x);
double logit(double p);

/// Two-sided critical value for a confidence level, e.g. 0.95 -> 1.959964.
double two_sided_critical(double level);

}  // namespace sharpiv

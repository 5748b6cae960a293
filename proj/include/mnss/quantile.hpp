#pragma once

namespace mnss {

// Quantile of the standard normal distribution at lower-tail probability p,
// p in (0,1). Rational initial approximation polished with one Newton step
// against erfc; absolute error well below 1e-12 across the domain.
double normal_quantile(double p);

// Quantile of the chi-squared distribution with 1 degree of freedom at
// upper-tail probability `upper_tail` in (0,1]. Equals the squared normal
// quantile at upper_tail/2.
double chi2_quantile_1df(double upper_tail);

}  // namespace mnss

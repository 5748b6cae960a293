#include "mnss/quantile.hpp"

#include <cmath>
#include <stdexcept>

namespace mnss {

namespace {

// Wichura's PPND16 rational approximation (central region plus two tail
// regions); accurate to ~1e-15 on its own.
double normal_quantile_approx(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) *
                 r +
             4.5921953931549871457e+4) *
                r +
            1.3731693765509461125e+4) *
               r +
           1.9715909503065514427e+3) *
              r +
          1.3314166789178437745e+2) *
             r +
         3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) *
                 r +
             2.1213794301586595867e+4) *
                r +
            5.3941960214247511077e+3) *
               r +
           6.8718700749205790830e+2) *
              r +
          4.2313330701600911252e+1) *
             r +
         1.0);
    return q * num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258e+0) *
                r +
            3.64784832476320460504e+0) *
               r +
           5.76949722146069140550e+0) *
              r +
          4.63033784615654529590e+0) *
             r +
         1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e+0) *
              r +
          2.05319162663775882187e+0) *
             r +
         1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e+0) *
              r +
          5.46378491116411436990e+0) *
             r +
         6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) *
                 r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
    val = num / den;
  }
  return (q < 0.0) ? -val : val;
}

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: probability must lie in (0,1)");
  }
  double z = normal_quantile_approx(p);
  // One Newton step on Phi(z) - p using erfc keeps full double accuracy even
  // if the rational approximation degrades at the extremes. Work in the
  // nearer tail: for p > 1/2 the complement 1-p is exact (Sterbenz) and the
  // upper-tail erfc avoids cancellation.
  const double pdf = kInvSqrt2Pi * std::exp(-0.5 * z * z);
  if (pdf > 1e-300) {
    double residual;  // Phi(z) - p
    if (p <= 0.5) {
      residual = 0.5 * std::erfc(-z * kInvSqrt2) - p;
    } else {
      residual = (1.0 - p) - 0.5 * std::erfc(z * kInvSqrt2);
    }
    z -= residual / pdf;
  }
  return z;
}

double chi2_quantile_1df(double upper_tail) {
  if (!(upper_tail > 0.0 && upper_tail <= 1.0)) {
    throw std::domain_error(
        "chi2_quantile_1df: upper-tail probability must lie in (0,1]");
  }
  if (upper_tail == 1.0) return 0.0;
  const double z = normal_quantile(1.0 - 0.5 * upper_tail);
  return z * z;
}

}  // namespace mnss

#pragma once

namespace tlrgeo::kernels {

// Gamma function for strictly positive argument (Lanczos, g=7).
double gamma_fn(double x);
double log_gamma(double x);

// 1/Gamma(1+x) for |x| <= 0.5, full working precision (power series).
double inv_gamma1p(double x);

// Modified Bessel function of the second kind K_nu(x), nu > 0, x > 0.
// Temme series below x=2, Steed continued fraction above, upward recurrence
// in the order. Throws std::domain_error for x <= 0.
double bessel_k(double nu, double x);

} // namespace tlrgeo::kernels

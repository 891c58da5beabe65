#pragma once

#include "tlrgeo/common.hpp"
#include "tlrgeo/params.hpp"

namespace tlrgeo::kernels {

// Matern covariance C(d; sigma2, beta, nu). d = 0 returns sigma2 exactly.
// Half-integer smoothness (0.5, 1.5, 2.5) dispatches to the exponential
// closed forms; anything else goes through bessel_k.
double matern(double d, const MaternParams& p);

// The K_nu route regardless of nu; the closed forms are checked against it.
double matern_bessel(double d, const MaternParams& p);

// Batch evaluation used by covariance assembly: out[i] = matern(d[i]).
// Vectorized (exp_vec) for the closed-form smoothness values.
void matern_batch(index_t n, const double* d, const MaternParams& p, double* out);

// Parsimonious bivariate Matern, components i, j in {1, 2}. rho_ii = 1;
// rho_12 from the gamma-ratio formula with spatial dimension 2.
double bivariate_matern(double d, int i, int j, const BivariateMaternParams& p);

// xi + omega * tau_{g,h}(z) with tau_{g,h}(z) = (exp(gz)-1)/g * exp(h z^2 / 2).
double tgh_transform(double z, const TghParams& p);

} // namespace tlrgeo::kernels

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tlrgeo/kernels/covariance.hpp"
#include "tlrgeo/kernels/special.hpp"
#include "tlrgeo/simd/simd.hpp"

namespace tlrgeo {

double BivariateMaternParams::rho12() const {
    // beta12 * Gamma(nu11 + d/2)/Gamma(nu11) * Gamma(nu22 + d/2)/Gamma(nu22)
    //        * Gamma(nu12)/Gamma(nu12 + d/2), spatial dimension d = 2
    using kernels::gamma_fn;
    double n12 = nu12();
    return beta12 * (gamma_fn(nu11 + 1.0) / gamma_fn(nu11)) *
           (gamma_fn(nu22 + 1.0) / gamma_fn(nu22)) * (gamma_fn(n12) / gamma_fn(n12 + 1.0));
}

void BivariateMaternParams::validate() const {
    if (!(sigma11 > 0.0) || !(sigma22 > 0.0) || !(a > 0.0) || !(nu11 > 0.0) || !(nu22 > 0.0))
        throw std::invalid_argument("BivariateMaternParams: sigma11, sigma22, a, nu11, nu22 must be > 0");
    double rho = rho12();
    if (std::abs(rho) > 1.0)
        throw std::invalid_argument("BivariateMaternParams: derived |rho12| = " +
                                    std::to_string(std::abs(rho)) + " exceeds 1 (not positive definite)");
}

} // namespace tlrgeo

namespace tlrgeo::kernels {

namespace {

inline bool near(double a, double b) { return a == b; }

// unit-variance Matern correlation at scaled distance t = d / beta
double matern_corr_bessel(double t, double nu) {
    if (t == 0.0) return 1.0;
    // 2^{1-nu} / Gamma(nu) * t^nu * K_nu(t)
    double lg = log_gamma(nu);
    double val = std::exp((1.0 - nu) * 0.6931471805599453094 - lg + nu * std::log(t)) * bessel_k(nu, t);
    return val;
}

} // namespace

double matern_bessel(double d, const MaternParams& p) {
    p.validate();
    if (d < 0.0) throw std::invalid_argument("matern: distance must be >= 0");
    if (d == 0.0) return p.sigma2;
    return p.sigma2 * matern_corr_bessel(d / p.beta, p.nu);
}

double matern(double d, const MaternParams& p) {
    p.validate();
    if (d < 0.0) throw std::invalid_argument("matern: distance must be >= 0");
    if (d == 0.0) return p.sigma2;
    double t = d / p.beta;
    if (near(p.nu, 0.5)) return p.sigma2 * std::exp(-t);
    if (near(p.nu, 1.5)) return p.sigma2 * (1.0 + t) * std::exp(-t);
    if (near(p.nu, 2.5)) return p.sigma2 * (1.0 + t + t * t / 3.0) * std::exp(-t);
    return p.sigma2 * matern_corr_bessel(t, p.nu);
}

void matern_batch(index_t n, const double* d, const MaternParams& p, double* out) {
    p.validate();
    bool closed = near(p.nu, 0.5) || near(p.nu, 1.5) || near(p.nu, 2.5);
    if (!closed) {
        for (index_t i = 0; i < n; ++i)
            out[i] = (d[i] == 0.0) ? p.sigma2 : p.sigma2 * matern_corr_bessel(d[i] / p.beta, p.nu);
        return;
    }
    constexpr index_t kChunk = 1024;
    double t[kChunk];
    for (index_t i0 = 0; i0 < n; i0 += kChunk) {
        index_t len = std::min(kChunk, n - i0);
        double inv_beta = 1.0 / p.beta;
        for (index_t i = 0; i < len; ++i) t[i] = -d[i0 + i] * inv_beta;
        simd::exp_vec(len, t, out + i0);
        if (near(p.nu, 0.5)) {
            simd::scal(len, p.sigma2, out + i0);
        } else if (near(p.nu, 1.5)) {
            for (index_t i = 0; i < len; ++i) out[i0 + i] *= p.sigma2 * (1.0 - t[i]);
        } else {
            for (index_t i = 0; i < len; ++i)
                out[i0 + i] *= p.sigma2 * (1.0 - t[i] + t[i] * t[i] / 3.0);
        }
        // exact limit at d = 0
        for (index_t i = 0; i < len; ++i)
            if (d[i0 + i] == 0.0) out[i0 + i] = p.sigma2;
    }
}

double bivariate_matern(double d, int i, int j, const BivariateMaternParams& p) {
    p.validate();
    if (d < 0.0) throw std::invalid_argument("bivariate_matern: distance must be >= 0");
    if (i < 1 || i > 2 || j < 1 || j > 2)
        throw std::invalid_argument("bivariate_matern: components must be 1 or 2");
    double rho, si, sj, nu;
    if (i == j) {
        rho = 1.0;
        si = sj = (i == 1) ? p.sigma11 : p.sigma22;
        nu = (i == 1) ? p.nu11 : p.nu22;
    } else {
        rho = p.rho12();
        si = p.sigma11;
        sj = p.sigma22;
        nu = p.nu12();
    }
    if (d == 0.0) return rho * si * sj;
    MaternParams m{1.0, p.a, nu};
    return rho * si * sj * matern(d, m);
}

double tgh_transform(double z, const TghParams& p) {
    p.validate();
    double tau;
    if (p.g == 0.0)
        tau = z * std::exp(0.5 * p.h * z * z);
    else
        tau = std::expm1(p.g * z) / p.g * std::exp(0.5 * p.h * z * z);
    return p.xi + p.omega * tau;
}

} // namespace tlrgeo::kernels

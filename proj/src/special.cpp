#include <cmath>
#include <stdexcept>

#include "tlrgeo/kernels/special.hpp"

namespace tlrgeo::kernels {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Lanczos approximation, g = 7, 9 terms.
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

// Power series coefficients of 1/Gamma(x) = sum c_k x^k (A&S 6.1.34).
constexpr double kInvGammaSeries[26] = {
    1.0000000000000000e+00,  0.5772156649015329e+00,  -0.6558780715202538e+00,
    -0.0420026350340952e+00, 0.1665386113822915e+00,  -0.0421977345555443e+00,
    -0.0096219715278770e+00, 0.0072189432466630e+00,  -0.0011651675918591e+00,
    -0.0002152416741149e+00, 0.0001280502823882e+00,  -0.0000201348547807e+00,
    -0.0000012504934821e+00, 0.0000011330272320e+00,  -0.0000002056338417e+00,
    0.0000000061160950e+00,  0.0000000050020075e+00,  -0.0000000011812746e+00,
    0.0000000001043427e+00,  0.0000000000077823e+00,  -0.0000000000036968e+00,
    0.0000000000005100e+00,  -0.0000000000000206e+00, -0.0000000000000054e+00,
    0.0000000000000014e+00,  0.0000000000000001e+00,
};

double lanczos_sum(double x) {
    double s = kLanczos[0];
    for (int i = 1; i < 9; ++i) s += kLanczos[i] / (x + i);
    return s;
}

} // namespace

double gamma_fn(double x) {
    if (!(x > 0.0)) throw std::domain_error("gamma_fn: argument must be > 0");
    if (x < 0.5) {
        // reflection keeps the Lanczos argument >= 0.5
        return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
    }
    double z = x - 1.0;
    double t = z + 7.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * lanczos_sum(z);
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be > 0");
    if (x < 0.5) return std::log(kPi / std::sin(kPi * x)) - log_gamma(1.0 - x);
    double z = x - 1.0;
    double t = z + 7.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_sum(z));
}

double inv_gamma1p(double x) {
    // 1/Gamma(1+x) = sum c_{k+1} x^k
    double p = kInvGammaSeries[25];
    for (int k = 24; k >= 0; --k) p = p * x + kInvGammaSeries[k];
    return p;
}

namespace {

// Temme auxiliary functions on |mu| <= 0.5:
//   gam1 = [1/Gamma(1-mu) - 1/Gamma(1+mu)] / (2 mu)
//   gam2 = [1/Gamma(1-mu) + 1/Gamma(1+mu)] / 2
// Evaluated from the odd/even parts of the series directly, so there is no
// cancellation as mu -> 0.
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
    double mu2 = mu * mu;
    double odd = 0.0, even = 0.0;
    for (int k = 25; k >= 1; k -= 2) { // odd powers of the 1/Gamma(1+x) series
        odd = odd * mu2 + kInvGammaSeries[k];
        if (k - 1 >= 0) even = even * mu2 + kInvGammaSeries[k - 1];
    }
    gam1 = -odd;
    gam2 = even;
    gampl = inv_gamma1p(mu);
    gammi = inv_gamma1p(-mu);
}

// K_mu(x) and K_{mu+1}(x) for x <= 2, |mu| <= 0.5 (Temme 1975 series).
void bessel_k_temme(double mu, double x, double& kmu, double& kmu1) {
    constexpr double kEps = 1e-16;
    constexpr int kMaxIter = 500;

    double x2 = 0.5 * x;
    double pimu = kPi * mu;
    double fact = (std::abs(pimu) < 1e-30) ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    double fact2 = (std::abs(e) < 1e-30) ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    double ee = std::exp(e);
    double p = 0.5 * ee / gampl;
    double q = 0.5 / (ee * gammi);
    double c = 1.0;
    double d2 = x2 * x2;
    double sum1 = p;
    for (int k = 1; k <= kMaxIter; ++k) {
        ff = (k * ff + p + q) / (k * k - mu * mu);
        c *= d2 / k;
        p /= (k - mu);
        q /= (k + mu);
        double del = c * ff;
        sum += del;
        double del1 = c * (p - k * ff);
        sum1 += del1;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    kmu = sum;
    kmu1 = sum1 * (2.0 / x);
}

// K_mu(x) and K_{mu+1}(x) for x > 2 via Steed's continued fraction (CF2).
void bessel_k_cf2(double mu, double x, double& kmu, double& kmu1) {
    constexpr double kEps = 1e-16;
    constexpr int kMaxIter = 10000;

    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0, q2 = 1.0;
    double a1 = 0.25 - mu * mu;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= kMaxIter; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    h = a1 * h;
    kmu = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
    kmu1 = kmu * (mu + x + 0.5 - h) / x;
}

} // namespace

double bessel_k(double nu, double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel_k: x must be > 0");
    if (!(nu > 0.0)) throw std::domain_error("bessel_k: nu must be > 0");

    int nl = static_cast<int>(nu + 0.5);
    double mu = nu - nl; // in [-0.5, 0.5]
    double kmu, kmu1;
    if (x <= 2.0)
        bessel_k_temme(mu, x, kmu, kmu1);
    else
        bessel_k_cf2(mu, x, kmu, kmu1);
    // stable upward recurrence K_{m+1} = K_{m-1} + (2m/x) K_m
    for (int i = 1; i <= nl; ++i) {
        double knext = (mu + i) * (2.0 / x) * kmu1 + kmu;
        kmu = kmu1;
        kmu1 = knext;
    }
    return kmu;
}

} // namespace tlrgeo::kernels

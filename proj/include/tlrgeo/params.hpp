#pragma once

#include <stdexcept>
#include <string>

namespace tlrgeo {

// theta = (sigma^2, beta, nu): variance, range, smoothness. All positive.
struct MaternParams {
    double sigma2 = 1.0;
    double beta = 0.1;
    double nu = 0.5;

    void validate() const {
        if (!(sigma2 > 0.0) || !(beta > 0.0) || !(nu > 0.0))
            throw std::invalid_argument("MaternParams: sigma2, beta, nu must be > 0");
    }
};

// Parsimonious bivariate model. sigma11/sigma22 are the marginal standard
// deviations, `a` the shared range, nu11/nu22 the marginal smoothness, and
// beta12 the cross coefficient (beta11 = beta22 = 1 implied). The cross
// smoothness nu12 is always (nu11+nu22)/2 and is never stored.
struct BivariateMaternParams {
    double sigma11 = 1.0;
    double sigma22 = 1.0;
    double a = 0.1;
    double nu11 = 0.5;
    double nu22 = 0.5;
    double beta12 = 0.0;

    double nu12() const noexcept { return 0.5 * (nu11 + nu22); }
    double rho12() const; // colocated correlation, spatial dimension 2

    void validate() const;
};

// Tukey g-and-h transform parameters.
struct TghParams {
    double xi = 0.0;
    double omega = 1.0;
    double g = 0.0;
    double h = 0.0;

    void validate() const {
        if (!(omega > 0.0)) throw std::invalid_argument("TghParams: omega must be > 0");
        if (h < 0.0) throw std::invalid_argument("TghParams: h must be >= 0");
    }
};

enum class KernelId { matern, bivariate_matern, tgh_matern };

const char* to_string(KernelId k) noexcept;
KernelId kernel_from_string(const std::string& s);

} // namespace tlrgeo

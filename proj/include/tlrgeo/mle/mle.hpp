#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tlrgeo/cov/assemble.hpp"
#include "tlrgeo/location.hpp"
#include "tlrgeo/ordering/graph.hpp"
#include "tlrgeo/params.hpp"

namespace tlrgeo::mle {

// Gaussian log-likelihood through the TLR pipeline:
// assemble -> compress -> tlr_potrf -> logdet + forward solve.
// Throws factorization_error when Sigma(theta) is not PD at compression
// accuracy; fit_matern maps that to -inf for the optimizer.
double loglik_tlr(const MaternParams& theta, const LocationSet& locs,
                  const std::vector<double>& z, index_t nb, double epsilon);

// Exact dense route, usable at desk scale and as the reference in tests.
double loglik_dense(const MaternParams& theta, const LocationSet& locs,
                    const std::vector<double>& z);

// f(sigma2, beta, nu) = sigma2 * beta^(-2 nu), the quantity identifiable
// under infill asymptotics.
double identifiable_f(const MaternParams& theta);

struct OptimizerConfig {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> initial;
    double tolerance = 1e-9; // relative objective-change stopping rule
    int max_iterations = 2000;

    void validate() const;
};

struct OptimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

// Derivative-free bound-constrained maximization: Nelder-Mead simplex with
// candidates clipped into the box. Objective may return -inf for infeasible
// evaluations; if no evaluation ever succeeds a runtime_error is thrown.
OptimizeResult maximize(const std::function<double(const std::vector<double>&)>& objective,
                        const OptimizerConfig& config);

struct MleOptions {
    index_t nb = 320;
    double epsilon = 1e-7;
    MaternParams lower{0.01, 0.001, 0.1};
    MaternParams upper{100.0, 3.0, 5.0};
    MaternParams initial{1.0, 0.1, 0.5};
    double tolerance = 1e-9;
    int max_iterations = 2000;
};

struct MleResult {
    MaternParams theta_hat;
    double loglik_at_opt = 0.0;
    int iterations = 0;
    bool converged = false;
    double f_hat = 0.0; // always sigma2_hat * beta_hat^(-2 nu_hat)
};

// Maximize the TLR log-likelihood over log-parameters inside the box.
MleResult fit_matern(const LocationSet& locs, const std::vector<double>& z,
                     const MleOptions& opt);

struct ReplicateExperiment {
    index_t n = 1600;
    index_t nb = 320;
    double epsilon = 1e-7;
    ordering::OrderingSpec ordering;
    MaternParams true_params{1.0, 0.1, 0.5};
    int replicates = 10;
    std::uint64_t seed_base = 0;
    MleOptions opt;
};

struct ReplicateRow {
    int replicate = 0;
    std::uint64_t seed = 0;
    OrderingMethod ordering = OrderingMethod::none;
    MaternParams theta_hat;
    double f_hat = 0.0;
    int iterations = 0;
    bool converged = false;
    double seconds = 0.0;
    bool failed = false;
};

// five-number summary over successful replicates (NaN when none)
struct Quantiles {
    double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
};

struct EstimationReport {
    ReplicateExperiment config;
    std::vector<ReplicateRow> rows;

    Quantiles sigma2, beta, nu, f;
    double median_sigma2 = 0.0, median_beta = 0.0, median_nu = 0.0, median_f = 0.0;
};

// One synthetic dataset per replicate (same data for every ordering at equal
// seeds: the field is simulated in generation order, then permuted).
EstimationReport run_replicates(const ReplicateExperiment& cfg);

// replicate,seed,ordering,sigma2_hat,beta_hat,nu_hat,f_hat,iterations,converged,seconds
void write_estimation_csv(const std::string& path, const EstimationReport& report,
                          const std::string& config_comment = "");

} // namespace tlrgeo::mle

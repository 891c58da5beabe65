#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "tlrgeo/linalg/dense.hpp"
#include "tlrgeo/mle/mle.hpp"
#include "tlrgeo/simd/simd.hpp"
#include "tlrgeo/tlr/factor.hpp"

namespace tlrgeo::mle {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

double loglik_tlr(const MaternParams& theta, const LocationSet& locs,
                  const std::vector<double>& z, index_t nb, double epsilon) {
    theta.validate();
    if (static_cast<index_t>(z.size()) != locs.n())
        throw std::invalid_argument("loglik_tlr: observation length mismatch");
    cov::CovarianceModel model;
    model.kernel = KernelId::matern;
    model.matern = theta;
    tlr::TlrMatrix sigma = tlr::compress_covariance(locs, model, nb, epsilon);
    tlr::TlrCholeskyFactor fac = tlr::tlr_potrf(std::move(sigma));
    double half_logdet = 0.5 * tlr::logdet(fac);
    std::vector<double> y = tlr::tlr_trsv(fac, z);
    double quad = simd::dot(static_cast<index_t>(y.size()), y.data(), y.data());
    double n = static_cast<double>(locs.n());
    return -0.5 * n * kLog2Pi - half_logdet - 0.5 * quad;
}

double loglik_dense(const MaternParams& theta, const LocationSet& locs,
                    const std::vector<double>& z) {
    theta.validate();
    if (static_cast<index_t>(z.size()) != locs.n())
        throw std::invalid_argument("loglik_dense: observation length mismatch");
    cov::CovarianceModel model;
    model.kernel = KernelId::matern;
    model.matern = theta;
    cov::TiledDenseMatrix sigma = cov::build_covariance(locs, model, locs.n());
    linalg::Matrix& full = sigma.tile(0, 0);
    linalg::potrf_lower(full);
    double half_logdet = 0.0;
    for (index_t i = 0; i < full.rows(); ++i) half_logdet += std::log(full(i, i));
    std::vector<double> y = z;
    linalg::trsv_lower(full, y.data());
    double quad = simd::dot(static_cast<index_t>(y.size()), y.data(), y.data());
    double n = static_cast<double>(locs.n());
    return -0.5 * n * kLog2Pi - half_logdet - 0.5 * quad;
}

double identifiable_f(const MaternParams& theta) {
    return theta.sigma2 * std::pow(theta.beta, -2.0 * theta.nu);
}

void OptimizerConfig::validate() const {
    size_t d = initial.size();
    if (d == 0 || lower.size() != d || upper.size() != d)
        throw std::invalid_argument("OptimizerConfig: dimension mismatch");
    for (size_t i = 0; i < d; ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i]))
            throw std::invalid_argument("OptimizerConfig: bounds must be finite with lower < upper");
        if (initial[i] < lower[i] || initial[i] > upper[i])
            throw std::invalid_argument("OptimizerConfig: initial point outside bounds");
    }
}

OptimizeResult maximize(const std::function<double(const std::vector<double>&)>& objective,
                        const OptimizerConfig& config) {
    config.validate();
    size_t d = config.initial.size();

    auto clip = [&](std::vector<double>& x) {
        for (size_t i = 0; i < d; ++i) x[i] = std::clamp(x[i], config.lower[i], config.upper[i]);
    };
    int evaluations = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evaluations;
        double v = objective(x);
        return std::isnan(v) ? -kInf : v; // minimize -v below
    };

    // initial simplex: coordinate steps of a quarter box width, flipped when
    // they would leave the box
    std::vector<std::vector<double>> xs(d + 1, config.initial);
    std::vector<double> fs(d + 1);
    for (size_t i = 0; i < d; ++i) {
        double step = 0.25 * (config.upper[i] - config.lower[i]);
        step = std::min(step, 0.5);
        double& xi = xs[i + 1][i];
        xi = (xi + step <= config.upper[i]) ? xi + step : xi - step;
    }
    for (size_t i = 0; i <= d; ++i) {
        clip(xs[i]);
        fs[i] = -eval(xs[i]);
    }
    if (std::all_of(fs.begin(), fs.end(), [](double v) { return v == kInf; }))
        throw std::runtime_error("maximize: no feasible evaluation succeeded");

    constexpr double kAlpha = 1.0, kGamma = 2.0, kRho = 0.5, kSigma = 0.5;
    int iterations = 0;
    bool converged = false;
    std::vector<size_t> order(d + 1);

    while (iterations < config.max_iterations) {
        ++iterations;
        std::iota(order.begin(), order.end(), size_t{0});
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return fs[a] < fs[b]; });
        double fbest = fs[order[0]];
        double fworst = fs[order[d]];
        if (std::isfinite(fworst) &&
            fworst - fbest <= config.tolerance * std::max(1.0, std::abs(fbest))) {
            converged = true;
            break;
        }

        std::vector<double> centroid(d, 0.0);
        for (size_t i = 0; i < d; ++i)
            for (size_t j = 0; j < d; ++j) centroid[j] += xs[order[i]][j] / static_cast<double>(d);
        const std::vector<double>& worst = xs[order[d]];

        auto along = [&](double t) {
            std::vector<double> x(d);
            for (size_t j = 0; j < d; ++j) x[j] = centroid[j] + t * (centroid[j] - worst[j]);
            clip(x);
            return x;
        };

        std::vector<double> xr = along(kAlpha);
        double fr = -eval(xr);
        if (fr < fbest) {
            std::vector<double> xe = along(kGamma);
            double fe = -eval(xe);
            if (fe < fr) { xs[order[d]] = std::move(xe); fs[order[d]] = fe; }
            else { xs[order[d]] = std::move(xr); fs[order[d]] = fr; }
            continue;
        }
        if (fr < fs[order[d - 1]]) {
            xs[order[d]] = std::move(xr);
            fs[order[d]] = fr;
            continue;
        }
        // contraction (outside if the reflection improved on the worst)
        std::vector<double> xc = along(fr < fworst ? kRho : -kRho);
        double fc = -eval(xc);
        if (fc < std::min(fr, fworst)) {
            xs[order[d]] = std::move(xc);
            fs[order[d]] = fc;
            continue;
        }
        // shrink toward the best vertex
        for (size_t i = 1; i <= d; ++i) {
            size_t idx = order[i];
            for (size_t j = 0; j < d; ++j)
                xs[idx][j] = xs[order[0]][j] + kSigma * (xs[idx][j] - xs[order[0]][j]);
            clip(xs[idx]);
            fs[idx] = -eval(xs[idx]);
        }
    }

    size_t best = static_cast<size_t>(
        std::min_element(fs.begin(), fs.end()) - fs.begin());
    OptimizeResult out;
    out.x = xs[best];
    out.value = -fs[best];
    out.iterations = iterations;
    out.evaluations = evaluations;
    out.converged = converged;
    return out;
}

MleResult fit_matern(const LocationSet& locs, const std::vector<double>& z,
                     const MleOptions& opt) {
    OptimizerConfig cfg;
    cfg.lower = {std::log(opt.lower.sigma2), std::log(opt.lower.beta), std::log(opt.lower.nu)};
    cfg.upper = {std::log(opt.upper.sigma2), std::log(opt.upper.beta), std::log(opt.upper.nu)};
    cfg.initial = {std::log(opt.initial.sigma2), std::log(opt.initial.beta), std::log(opt.initial.nu)};
    cfg.tolerance = opt.tolerance;
    cfg.max_iterations = opt.max_iterations;

    auto objective = [&](const std::vector<double>& u) {
        MaternParams theta{std::exp(u[0]), std::exp(u[1]), std::exp(u[2])};
        try {
            return loglik_tlr(theta, locs, z, opt.nb, opt.epsilon);
        } catch (const factorization_error&) {
            return -kInf; // non-PD at compression accuracy
        }
    };
    OptimizeResult res = maximize(objective, cfg);

    MleResult out;
    out.theta_hat = {std::exp(res.x[0]), std::exp(res.x[1]), std::exp(res.x[2])};
    out.loglik_at_opt = res.value;
    out.iterations = res.iterations;
    out.converged = res.converged;
    out.f_hat = identifiable_f(out.theta_hat);
    return out;
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    size_t k = v.size();
    return (k % 2 == 1) ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

Quantiles quantiles_of(std::vector<double> v) {
    Quantiles q;
    if (v.empty()) {
        q.min = q.q25 = q.median = q.q75 = q.max = std::nan("");
        return q;
    }
    std::sort(v.begin(), v.end());
    auto at = [&](double p) {
        double pos = p * static_cast<double>(v.size() - 1);
        size_t lo = static_cast<size_t>(pos);
        size_t hi = std::min(lo + 1, v.size() - 1);
        double w = pos - static_cast<double>(lo);
        return (1.0 - w) * v[lo] + w * v[hi];
    };
    q.min = v.front();
    q.q25 = at(0.25);
    q.median = at(0.5);
    q.q75 = at(0.75);
    q.max = v.back();
    return q;
}

} // namespace

EstimationReport run_replicates(const ReplicateExperiment& cfg) {
    EstimationReport report;
    report.config = cfg;
    cov::CovarianceModel model;
    model.kernel = KernelId::matern;
    model.matern = cfg.true_params;

    for (int r = 0; r < cfg.replicates; ++r) {
        std::uint64_t seed = cfg.seed_base + static_cast<std::uint64_t>(r);
        ReplicateRow row;
        row.replicate = r;
        row.seed = seed;
        row.ordering = cfg.ordering.method;
        auto t0 = std::chrono::steady_clock::now();
        try {
            LocationSet locs = generate_uniform_locations(cfg.n, seed);
            std::vector<double> z = cov::simulate_field(locs, model, seed);
            Permutation perm = ordering::order_locations(locs, cfg.ordering, model);
            LocationSet ordered = apply_permutation(locs, perm);
            std::vector<double> zo = apply_permutation(z, perm);

            MleOptions opt = cfg.opt;
            opt.nb = cfg.nb;
            opt.epsilon = cfg.epsilon;
            MleResult res = fit_matern(ordered, zo, opt);
            row.theta_hat = res.theta_hat;
            row.f_hat = res.f_hat;
            row.iterations = res.iterations;
            row.converged = res.converged;
        } catch (const std::exception&) {
            row.failed = true;
            row.theta_hat = {std::nan(""), std::nan(""), std::nan("")};
            row.f_hat = std::nan("");
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report.rows.push_back(row);
    }

    std::vector<double> s2, be, nu, f;
    for (const auto& row : report.rows) {
        if (row.failed) continue;
        s2.push_back(row.theta_hat.sigma2);
        be.push_back(row.theta_hat.beta);
        nu.push_back(row.theta_hat.nu);
        f.push_back(row.f_hat);
    }
    report.sigma2 = quantiles_of(s2);
    report.beta = quantiles_of(be);
    report.nu = quantiles_of(nu);
    report.f = quantiles_of(f);
    report.median_sigma2 = median_of(s2);
    report.median_beta = median_of(be);
    report.median_nu = median_of(nu);
    report.median_f = median_of(f);
    return report;
}

void write_estimation_csv(const std::string& path, const EstimationReport& report,
                          const std::string& config_comment) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path);
    if (!config_comment.empty()) out << "# " << config_comment << "\n";
    out << "replicate,seed,ordering,sigma2_hat,beta_hat,nu_hat,f_hat,iterations,converged,seconds\n";
    out.precision(12);
    for (const auto& r : report.rows) {
        out << r.replicate << ',' << r.seed << ',' << to_string(r.ordering) << ','
            << r.theta_hat.sigma2 << ',' << r.theta_hat.beta << ',' << r.theta_hat.nu << ','
            << r.f_hat << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
            << r.seconds << '\n';
    }
    if (!out) throw io_error("write failed: " + path);
}

} // namespace tlrgeo::mle

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"

#include "support/oracles.hpp"
#include "tlrgeo/kernels/covariance.hpp"
#include "tlrgeo/mle/mle.hpp"
#include "tlrgeo/ordering/curves.hpp"
#include "tlrgeo/util/parallel.hpp"

using namespace tlrgeo;
using oracles::rel_err;

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

TEST_CASE("identifiable_f") {
    CHECK(mle::identifiable_f({1.0, 1.0, 0.77}) == 1.0);
    CHECK(mle::identifiable_f({1.0, 0.1, 0.5}) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(mle::identifiable_f({2.0, 0.5, 1.0}) == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("loglik with identity covariance has the closed form") {
    // nearly-independent points: distances >> beta so Sigma ~ I
    LocationSet locs;
    locs.points = {{0.0, 0.0}, {0.5, 0.5}, {1.0, 0.0}, {0.0, 1.0}};
    std::vector<double> z{0.3, -1.2, 0.7, 0.1};
    MaternParams theta{1.0, 1e-4, 0.5};
    double zz = 0.0;
    for (double v : z) zz += v * v;
    double want = -2.0 * kLog2Pi - 0.5 * zz;
    CHECK(std::abs(mle::loglik_dense(theta, locs, z) - want) <= 1e-9);
    CHECK(std::abs(mle::loglik_tlr(theta, locs, z, 2, 1e-7) - want) <= 1e-9);
}

TEST_CASE("loglik matches explicit 4x4 linear algebra") {
    auto locs = generate_uniform_locations(4, 19);
    std::vector<double> z{0.4, -0.2, 1.1, 0.05};
    MaternParams theta{1.3, 0.2, 0.8};

    // brute force: explicit inverse and determinant of the 4x4
    linalg::Matrix s(4, 4);
    for (index_t i = 0; i < 4; ++i)
        for (index_t j = 0; j < 4; ++j) {
            double dx = locs.points[i].x - locs.points[j].x;
            double dy = locs.points[i].y - locs.points[j].y;
            s(i, j) = kernels::matern(std::hypot(dx, dy), theta);
        }
    // determinant and inverse by Gaussian elimination on an augmented system
    double aug[4][8];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 8; ++j) aug[i][j] = j < 4 ? s(i, j) : (j - 4 == i ? 1.0 : 0.0);
    double det = 1.0;
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::abs(aug[r][c]) > std::abs(aug[piv][c])) piv = r;
        if (piv != c) {
            std::swap_ranges(aug[c], aug[c] + 8, aug[piv]);
            det = -det;
        }
        det *= aug[c][c];
        double inv = 1.0 / aug[c][c];
        for (int j = 0; j < 8; ++j) aug[c][j] *= inv;
        for (int r = 0; r < 4; ++r) {
            if (r == c) continue;
            double f = aug[r][c];
            for (int j = 0; j < 8; ++j) aug[r][j] -= f * aug[c][j];
        }
    }
    double quad = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) quad += z[i] * aug[i][4 + j] * z[j];
    double want = -2.0 * kLog2Pi - 0.5 * std::log(det) - 0.5 * quad;

    CHECK(std::abs(mle::loglik_dense(theta, locs, z) - want) <= 1e-9);
    CHECK(std::abs(mle::loglik_tlr(theta, locs, z, 2, 1e-9) - want) <= 1e-6);
}

TEST_CASE("TLR loglik tracks the dense pipeline at desk scale") {
    auto locs = generate_uniform_locations(400, 8);
    auto perm = ordering::order_by_curve(locs, ordering::Curve::hilbert);
    auto ordered = apply_permutation(locs, perm);
    cov::CovarianceModel model;
    model.matern = {1.0, 0.1, 0.5};
    auto z = cov::simulate_field(ordered, model, 99);
    util::set_num_threads(2);
    double tlr_ll = mle::loglik_tlr(model.matern, ordered, z, 100, 1e-7);
    util::set_num_threads(1);
    double dense_ll = mle::loglik_dense(model.matern, ordered, z);
    CHECK(std::abs(tlr_ll - dense_ll) <= 1e-2);
}

TEST_CASE("loglik is ordering-invariant up to compression error") {
    auto locs = generate_uniform_locations(400, 21);
    cov::CovarianceModel model;
    model.matern = {1.0, 0.1, 0.5};
    auto z = cov::simulate_field(locs, model, 5);

    double base = mle::loglik_tlr(model.matern, locs, z, 100, 1e-7);
    for (auto curve : {ordering::Curve::morton, ordering::Curve::hilbert}) {
        auto perm = ordering::order_by_curve(locs, curve);
        auto ordered = apply_permutation(locs, perm);
        auto zo = apply_permutation(z, perm);
        double ll = mle::loglik_tlr(model.matern, ordered, zo, 100, 1e-7);
        CHECK(std::abs(ll - base) <= 1e-2);
    }

    // dense route is exactly invariant (same sum, different order -> tiny fp drift)
    auto perm = ordering::order_kdtree(locs);
    double d0 = mle::loglik_dense(model.matern, locs, z);
    double d1 = mle::loglik_dense(model.matern, apply_permutation(locs, perm),
                                  apply_permutation(z, perm));
    CHECK(std::abs(d0 - d1) <= 1e-6 * std::abs(d0));
}

TEST_CASE("maximize solves a quadratic and clips at bounds") {
    mle::OptimizerConfig cfg;
    cfg.lower = {0.0};
    cfg.upper = {1.0};
    cfg.initial = {0.9};
    cfg.tolerance = 1e-12;
    cfg.max_iterations = 500;
    auto res = mle::maximize([](const std::vector<double>& x) {
        return -(x[0] - 0.3) * (x[0] - 0.3);
    }, cfg);
    CHECK(std::abs(res.x[0] - 0.3) <= 1e-6);
    CHECK(res.iterations > 0);

    // optimum outside the box: lands on the boundary
    auto clipped = mle::maximize([](const std::vector<double>& x) {
        return -(x[0] - 2.0) * (x[0] - 2.0);
    }, cfg);
    CHECK(clipped.x[0] == doctest::Approx(1.0).epsilon(1e-9));

    // a 2-d bowl
    mle::OptimizerConfig cfg2;
    cfg2.lower = {-2.0, -2.0};
    cfg2.upper = {2.0, 2.0};
    cfg2.initial = {1.5, -1.0};
    cfg2.tolerance = 1e-12;
    cfg2.max_iterations = 1000;
    auto res2 = mle::maximize([](const std::vector<double>& x) {
        return -((x[0] - 0.5) * (x[0] - 0.5) + 2.0 * (x[1] + 0.25) * (x[1] + 0.25));
    }, cfg2);
    CHECK(std::abs(res2.x[0] - 0.5) <= 1e-5);
    CHECK(std::abs(res2.x[1] + 0.25) <= 1e-5);

    // infeasible everywhere
    CHECK_THROWS_AS(mle::maximize([](const std::vector<double>&) {
        return -std::numeric_limits<double>::infinity();
    }, cfg), std::runtime_error);

    mle::OptimizerConfig bad = cfg;
    bad.initial = {2.0};
    CHECK_THROWS_AS(mle::maximize([](const std::vector<double>&) { return 0.0; }, bad),
                    std::invalid_argument);
}

TEST_CASE("likelihood peaks near the truth on simulated data") {
    cov::CovarianceModel model;
    model.matern = {1.0, 0.1, 0.5};
    int wins = 0;
    util::set_num_threads(2);
    for (int rep = 0; rep < 10; ++rep) {
        auto locs = generate_uniform_locations(400, 600 + rep);
        auto perm = ordering::order_by_curve(locs, ordering::Curve::hilbert);
        auto ordered = apply_permutation(locs, perm);
        auto z = apply_permutation(cov::simulate_field(locs, model, 600 + rep), perm);
        double at_truth = mle::loglik_tlr(model.matern, ordered, z, 100, 1e-7);
        MaternParams far{1.0, 1.0, 0.5}; // beta off by 10x
        double at_far = mle::loglik_tlr(far, ordered, z, 100, 1e-7);
        if (at_truth >= at_far) ++wins;
    }
    util::set_num_threads(1);
    CHECK(wins >= 9);
}

TEST_CASE("fit_matern recovers parameters on one small replicate") {
    cov::CovarianceModel model;
    model.matern = {1.0, 0.1, 0.5};
    auto locs = generate_uniform_locations(500, 4242);
    auto perm = ordering::order_by_curve(locs, ordering::Curve::hilbert);
    auto ordered = apply_permutation(locs, perm);
    auto z = apply_permutation(cov::simulate_field(locs, model, 4242), perm);

    mle::MleOptions opt;
    opt.nb = 125;
    opt.epsilon = 1e-7;
    util::set_num_threads(2);
    auto res = mle::fit_matern(ordered, z, opt);
    util::set_num_threads(1);

    // f is the identifiable quantity; sigma2/beta individually are noisy
    CHECK(res.f_hat == doctest::Approx(mle::identifiable_f(res.theta_hat)).epsilon(1e-12));
    CHECK(res.f_hat > 2.0);
    CHECK(res.f_hat < 50.0);
    CHECK(res.theta_hat.nu > 0.3);
    CHECK(res.theta_hat.nu < 0.8);
    CHECK(res.iterations > 0);
}

TEST_CASE("run_replicates produces a deterministic aligned report") {
    mle::ReplicateExperiment cfg;
    cfg.n = 150;
    cfg.nb = 50;
    cfg.epsilon = 1e-6;
    cfg.ordering.method = OrderingMethod::hilbert;
    cfg.true_params = {1.0, 0.1, 0.5};
    cfg.replicates = 2;
    cfg.seed_base = 31;
    cfg.opt.max_iterations = 60; // keep the unit test quick

    util::set_num_threads(2);
    auto rep1 = mle::run_replicates(cfg);
    auto rep2 = mle::run_replicates(cfg);
    util::set_num_threads(1);
    REQUIRE(rep1.rows.size() == 2);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(rep1.rows[i].theta_hat.sigma2 == rep2.rows[i].theta_hat.sigma2);
        CHECK(rep1.rows[i].theta_hat.beta == rep2.rows[i].theta_hat.beta);
        CHECK(rep1.rows[i].f_hat == rep2.rows[i].f_hat);
        CHECK(rep1.rows[i].seed == cfg.seed_base + i);
        CHECK(!rep1.rows[i].failed);
    }
    CHECK(rep1.f.median == rep1.median_f);
    CHECK(rep1.f.min <= rep1.f.q25);
    CHECK(rep1.f.q25 <= rep1.f.median);
    CHECK(rep1.f.median <= rep1.f.q75);
    CHECK(rep1.f.q75 <= rep1.f.max);

    namespace fs = std::filesystem;
    fs::path path = fs::temp_directory_path() / "tlrgeo_est.csv";
    mle::write_estimation_csv(path.string(), rep1, "cfg");
    std::ifstream f(path);
    std::string line;
    std::getline(f, line);
    CHECK(line == "# cfg");
    std::getline(f, line);
    CHECK(line == "replicate,seed,ordering,sigma2_hat,beta_hat,nu_hat,f_hat,iterations,converged,seconds");
    int rows = 0;
    while (std::getline(f, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
    fs::remove(path);
}

#include <array>
#include <cmath>
#include <random>

#include "doctest.h"

#include "support/oracles.hpp"
#include "tlrgeo/linalg/dense.hpp"
#include "tlrgeo/simd/simd.hpp"

using namespace tlrgeo;
using linalg::Matrix;

namespace {

Matrix random_spd(index_t n, unsigned seed) {
    Matrix a = oracles::random_matrix(n, n, seed);
    Matrix spd(n, n);
    oracles::naive_gemm(false, true, n, n, n, 1.0, a, a, 0.0, spd);
    for (index_t i = 0; i < n; ++i) spd(i, i) += n; // well conditioned
    return spd;
}

} // namespace

TEST_CASE("potrf_lower matches GSL") {
    for (index_t n : {1, 2, 5, 17, 64, 65, 130, 257}) {
        Matrix a = random_spd(n, 100 + static_cast<unsigned>(n));
        Matrix want = oracles::gsl_cholesky_lower(a);
        Matrix got = a;
        linalg::potrf_lower(got);
        for (index_t j = 0; j < n; ++j)
            for (index_t i = j; i < n; ++i)
                CHECK(std::abs(got(i, j) - want(i, j)) <= 1e-10 * (1.0 + std::abs(want(i, j))));
    }
}

TEST_CASE("potrf_lower rejects non-PD with the failing pivot") {
    Matrix a(3, 3);
    a(0, 0) = 4.0;
    a(1, 1) = 1.0;
    a(2, 2) = -2.0;
    bool threw = false;
    try {
        linalg::potrf_lower(a, 7);
    } catch (const factorization_error& e) {
        threw = true;
        CHECK(e.tile() == 7);
        CHECK(e.pivot() == 2);
    }
    CHECK(threw);
}

TEST_CASE("triangular solves invert the factor") {
    std::mt19937 gen(5);
    for (index_t n : {1, 3, 40, 129}) {
        Matrix spd = random_spd(n, 55 + static_cast<unsigned>(n));
        Matrix l = spd;
        linalg::potrf_lower(l);

        Matrix x = oracles::random_matrix(n, 7, gen());
        Matrix rhs = x;
        linalg::trsm_lower_left(l, rhs); // rhs = L^{-1} x
        Matrix back(n, 7);
        // back = L * rhs restricted to lower triangle of l
        for (index_t c = 0; c < 7; ++c) {
            std::vector<double> y(n, 0.0);
            for (index_t j = 0; j < n; ++j)
                for (index_t i = j; i < n; ++i) y[i] += l(i, j) * rhs(j, c);
            for (index_t i = 0; i < n; ++i) back(i, c) = y[i];
        }
        for (index_t j = 0; j < 7; ++j)
            for (index_t i = 0; i < n; ++i)
                CHECK(std::abs(back(i, j) - x(i, j)) <= 1e-9 * (1.0 + std::abs(x(i, j))));

        // vector variant agrees with the multi-RHS one
        std::vector<double> v(n);
        for (index_t i = 0; i < n; ++i) v[i] = x(i, 0);
        linalg::trsv_lower(l, v.data());
        for (index_t i = 0; i < n; ++i) CHECK(v[i] == doctest::Approx(rhs(i, 0)).epsilon(1e-12));
    }
}

TEST_CASE("trmv_lower applies the lower triangle") {
    Matrix l(3, 3);
    l(0, 0) = 2.0;
    l(1, 0) = 1.0;
    l(1, 1) = 3.0;
    l(2, 1) = -1.0;
    l(2, 2) = 0.5;
    double x[3] = {1.0, 2.0, 4.0};
    double y[3];
    linalg::trmv_lower(l, x, y);
    CHECK(y[0] == doctest::Approx(2.0));
    CHECK(y[1] == doctest::Approx(7.0));
    CHECK(y[2] == doctest::Approx(0.0));
}

TEST_CASE("qr_thin produces an orthonormal basis and reconstructs") {
    for (auto dims : {std::array<index_t, 2>{1, 1}, {8, 3}, {50, 50}, {200, 37}, {30, 90}}) {
        auto [m, n] = dims;
        Matrix a = oracles::random_matrix(m, n, 500 + static_cast<unsigned>(m + n));
        auto qr = linalg::qr_thin(a);
        index_t p = std::min(m, n);
        CHECK(qr.q.rows() == m);
        CHECK(qr.q.cols() == p);
        Matrix qtq(p, p);
        oracles::naive_gemm(true, false, p, p, m, 1.0, qr.q, qr.q, 0.0, qtq);
        for (index_t j = 0; j < p; ++j)
            for (index_t i = 0; i < p; ++i)
                CHECK(std::abs(qtq(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-12);
        Matrix recon(m, n);
        oracles::naive_gemm(false, false, m, n, p, 1.0, qr.q, qr.r, 0.0, recon);
        for (index_t j = 0; j < n; ++j)
            for (index_t i = 0; i < m; ++i)
                CHECK(std::abs(recon(i, j) - a(i, j)) <= 1e-11 * (1.0 + std::abs(a(i, j))));
    }
}

TEST_CASE("jacobi_svd agrees with the GSL oracle") {
    for (auto dims : {std::array<index_t, 2>{4, 4}, {60, 20}, {20, 60}, {100, 100}}) {
        auto [m, n] = dims;
        Matrix a = oracles::random_matrix(m, n, 900 + static_cast<unsigned>(m + 3 * n));
        auto got = linalg::jacobi_svd(a);
        auto want = oracles::gsl_svd(a);
        index_t p = std::min(m, n);
        REQUIRE(static_cast<index_t>(got.s.size()) == p);
        for (index_t i = 0; i < p; ++i)
            CHECK(oracles::rel_err(got.s[i], want.s[i]) <= 1e-10);
        // reconstruction U S V^T == A
        Matrix us(m, p);
        for (index_t j = 0; j < p; ++j)
            for (index_t i = 0; i < m; ++i) us(i, j) = got.u(i, j) * got.s[j];
        Matrix recon(m, n);
        oracles::naive_gemm(false, true, m, n, p, 1.0, us, got.v, 0.0, recon);
        for (index_t j = 0; j < n; ++j)
            for (index_t i = 0; i < m; ++i)
                CHECK(std::abs(recon(i, j) - a(i, j)) <= 1e-11 * (1.0 + std::abs(a(i, j))));
    }
}

TEST_CASE("jacobi_svd handles rank deficiency") {
    std::vector<double> sigma{5.0, 1.0, 1e-9, 0.0};
    Matrix a = oracles::matrix_with_spectrum(40, 30, sigma, 31);
    auto got = linalg::jacobi_svd(a);
    CHECK(oracles::rel_err(got.s[0], 5.0) <= 1e-9);
    CHECK(oracles::rel_err(got.s[1], 1.0) <= 1e-9);
    CHECK(got.s[2] <= 2e-9);
    CHECK(got.s[3] <= 1e-12);
}

TEST_CASE("spectral_norm_estimate is close to the top singular value") {
    std::vector<double> sigma{3.0, 2.9, 1.0};
    Matrix a = oracles::matrix_with_spectrum(50, 50, sigma, 77);
    double est = linalg::spectral_norm_estimate(a, 30);
    CHECK(est <= 3.0 * (1.0 + 1e-9));
    CHECK(est >= 2.8);
}

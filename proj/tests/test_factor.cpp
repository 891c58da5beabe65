#include <cmath>
#include <random>

#include "doctest.h"

#include "support/oracles.hpp"
#include "tlrgeo/cov/assemble.hpp"
#include "tlrgeo/linalg/dense.hpp"
#include "tlrgeo/ordering/curves.hpp"
#include "tlrgeo/tlr/factor.hpp"
#include "tlrgeo/util/parallel.hpp"

using namespace tlrgeo;
using linalg::Matrix;

namespace {

cov::CovarianceModel matern_model(double s2, double b, double nu) {
    cov::CovarianceModel m;
    m.kernel = KernelId::matern;
    m.matern = {s2, b, nu};
    return m;
}

// dense matrix from a TLR factor, lower triangle of L
Matrix dense_factor(const tlr::TlrCholeskyFactor& f) {
    index_t n = f.n();
    Matrix l(n, n);
    const tlr::TlrMatrix& m = f.m;
    for (index_t ti = 0; ti < m.grid(); ++ti) {
        index_t r0 = ti * m.nb();
        const Matrix& d = m.diag(ti);
        for (index_t j = 0; j < d.cols(); ++j)
            for (index_t i = j; i < d.rows(); ++i) l(r0 + i, r0 + j) = d(i, j);
        for (index_t tj = 0; tj < ti; ++tj) {
            Matrix block = tlr::reconstruct_tile(m.low(ti, tj));
            index_t c0 = tj * m.nb();
            for (index_t j = 0; j < block.cols(); ++j)
                for (index_t i = 0; i < block.rows(); ++i) l(r0 + i, c0 + j) = block(i, j);
        }
    }
    return l;
}

tlr::LowRankTile tile_from_dense(const Matrix& a, index_t rank_cap, unsigned seed) {
    // exact low-rank factors via the GSL oracle (independent of compress_tile)
    auto svd = oracles::gsl_svd(a);
    (void)seed;
    tlr::LowRankTile lr;
    lr.u = Matrix(a.rows(), rank_cap);
    lr.v = Matrix(a.cols(), rank_cap);
    for (index_t j = 0; j < rank_cap; ++j) {
        for (index_t i = 0; i < a.rows(); ++i) lr.u(i, j) = svd.u(i, j) * svd.s[j];
        for (index_t i = 0; i < a.cols(); ++i) lr.v(i, j) = svd.v(i, j);
    }
    return lr;
}

} // namespace

TEST_CASE("recompress_sum trivial and cancellation cases") {
    Matrix a = oracles::matrix_with_spectrum(30, 30, {3.0, 1.0, 0.3}, 5);
    auto ta = tile_from_dense(a, 3, 0);

    auto zero = tlr::LowRankTile::zero(30, 30);
    auto same = tlr::recompress_sum(ta, zero, 1e-7);
    CHECK(same.rank() == 3);
    for (index_t i = 0; i < same.u.size(); ++i) CHECK(same.u.data()[i] == ta.u.data()[i]);

    auto other = tlr::recompress_sum(zero, ta, 1e-7);
    CHECK(other.rank() == 3);

    // a + (-a) collapses to rank zero
    auto neg = ta;
    for (index_t i = 0; i < neg.u.size(); ++i) neg.u.data()[i] = -neg.u.data()[i];
    auto cancel = tlr::recompress_sum(ta, neg, 1e-7);
    CHECK(cancel.rank() == 0);
}

TEST_CASE("recompress_sum matches the dense-sum SVD oracle") {
    std::mt19937 gen(44);
    for (int trial = 0; trial < 6; ++trial) {
        index_t m = 40 + 7 * trial, n = 35 + 5 * trial;
        std::vector<double> sa, sb;
        for (int i = 0; i < 5; ++i) sa.push_back(std::pow(0.4, i));
        for (int i = 0; i < 7; ++i) sb.push_back(0.8 * std::pow(0.5, i));
        Matrix da = oracles::matrix_with_spectrum(m, n, sa, gen());
        Matrix db = oracles::matrix_with_spectrum(m, n, sb, gen());
        auto ta = tile_from_dense(da, 5, 0);
        auto tb = tile_from_dense(db, 7, 0);

        double eps = 1e-9;
        auto sum = tlr::recompress_sum(ta, tb, eps);
        CHECK(sum.rank() <= 12);

        Matrix dense_sum(m, n);
        for (index_t i = 0; i < dense_sum.size(); ++i)
            dense_sum.data()[i] = da.data()[i] + db.data()[i];
        auto oracle = oracles::gsl_svd(dense_sum);
        index_t oracle_rank = 0;
        for (double s : oracle.s)
            if (s > eps * oracle.s[0]) ++oracle_rank;
        CHECK(sum.rank() == oracle_rank);

        Matrix recon = tlr::reconstruct_tile(sum);
        for (index_t i = 0; i < recon.size(); ++i) recon.data()[i] -= dense_sum.data()[i];
        CHECK(oracles::spectral_norm_gsl(recon) <= eps * oracle.s[0] * 1.01);
    }
}

TEST_CASE("tlr_potrf on a single-tile grid equals dense Cholesky") {
    auto locs = generate_uniform_locations(40, 3);
    auto sigma = cov::build_covariance(locs, matern_model(1, 0.1, 0.5), 40);
    auto tlrm = tlr::compress_matrix(sigma, 1e-7);
    auto fac = tlr::tlr_potrf(std::move(tlrm));

    Matrix dense(40, 40);
    for (index_t i = 0; i < 40; ++i)
        for (index_t j = 0; j < 40; ++j) dense(i, j) = sigma.entry(i, j);
    Matrix want = oracles::gsl_cholesky_lower(dense);
    for (index_t j = 0; j < 40; ++j)
        for (index_t i = j; i < 40; ++i)
            CHECK(fac.m.diag(0)(i, j) == doctest::Approx(want(i, j)).epsilon(1e-9));
}

TEST_CASE("tlr_potrf of the identity is the identity") {
    cov::TiledDenseMatrix eye(24, 12);
    for (index_t i = 0; i < 24; ++i) eye.tile(i / 12, i / 12)(i % 12, i % 12) = 1.0;
    auto fac = tlr::tlr_potrf(tlr::compress_matrix(eye, 1e-7));
    for (index_t t = 0; t < 2; ++t)
        for (index_t j = 0; j < 12; ++j)
            for (index_t i = j; i < 12; ++i)
                CHECK(fac.m.diag(t)(i, j) == (i == j ? 1.0 : 0.0));
    CHECK(fac.m.low(1, 0).rank() == 0);
    CHECK(tlr::logdet(fac) == 0.0);

    // L = I: the forward solve returns b unchanged
    std::vector<double> b(24);
    for (index_t i = 0; i < 24; ++i) b[i] = 0.1 * static_cast<double>(i) - 1.0;
    CHECK(tlr::tlr_trsv(fac, b) == b);
}

TEST_CASE("logdet of a constant-diagonal matrix") {
    cov::TiledDenseMatrix four(10, 5);
    for (index_t i = 0; i < 10; ++i) four.tile(i / 5, i / 5)(i % 5, i % 5) = 4.0;
    auto fac = tlr::tlr_potrf(tlr::compress_matrix(four, 1e-7));
    CHECK(tlr::logdet(fac) == doctest::Approx(10.0 * std::log(4.0)).epsilon(1e-14));
}

TEST_CASE("factorization time grows with n") {
    auto model = matern_model(1.0, 0.1, 0.5);
    double medians[2];
    int idx = 0;
    for (index_t n : {1200, 2400}) {
        auto locs = generate_uniform_locations(n, 52);
        auto perm = ordering::order_by_curve(locs, ordering::Curve::hilbert);
        auto tlrm = tlr::compress_covariance(apply_permutation(locs, perm), model, 300, 1e-7);
        medians[idx++] = tlr::time_factorization(tlrm, 3, KernelId::matern, model.matern)
                             .median_seconds;
    }
    CHECK(medians[0] <= medians[1]);
}

TEST_CASE("tlr_potrf matches the dense oracle on a Matern matrix") {
    auto locs = generate_uniform_locations(800, 71);
    auto perm = ordering::order_by_curve(locs, ordering::Curve::hilbert);
    auto ordered = apply_permutation(locs, perm);
    auto model = matern_model(1.0, 0.1, 0.5);
    auto sigma = cov::build_covariance(ordered, model, 160);

    util::set_num_threads(2);
    auto fac = tlr::tlr_potrf(tlr::compress_matrix(sigma, 1e-7));
    util::set_num_threads(1);

    // residual || L L^T - Sigma ||_F / || Sigma ||_F
    Matrix l = dense_factor(fac);
    index_t n = 800;
    Matrix llt(n, n);
    oracles::naive_gemm(false, true, n, n, n, 1.0, l, l, 0.0, llt);
    double num = 0.0, den = 0.0;
    for (index_t j = 0; j < n; ++j)
        for (index_t i = 0; i < n; ++i) {
            double d = llt(i, j) - sigma.entry(i, j);
            num += d * d;
            den += sigma.entry(i, j) * sigma.entry(i, j);
        }
    CHECK(std::sqrt(num / den) <= 1e-5);

    // logdet against the dense factor
    Matrix dense(n, n);
    for (index_t j = 0; j < n; ++j)
        for (index_t i = 0; i < n; ++i) dense(i, j) = sigma.entry(i, j);
    Matrix lw = oracles::gsl_cholesky_lower(dense);
    double want_logdet = 0.0;
    for (index_t i = 0; i < n; ++i) want_logdet += 2.0 * std::log(lw(i, i));
    CHECK(std::abs(tlr::logdet(fac) - want_logdet) <= 1e-3);

    // forward solve against the dense solve
    std::vector<double> z(n);
    std::mt19937 gen(12);
    std::normal_distribution<double> dist;
    for (auto& v : z) v = dist(gen);
    auto y = tlr::tlr_trsv(fac, z);

    // residual || L y - z ||
    std::vector<double> ly(n, 0.0);
    for (index_t j = 0; j < n; ++j)
        for (index_t i = j; i < n; ++i) ly[i] += l(i, j) * y[j];
    double rnum = 0.0, rden = 0.0;
    for (index_t i = 0; i < n; ++i) {
        rnum += (ly[i] - z[i]) * (ly[i] - z[i]);
        rden += z[i] * z[i];
    }
    CHECK(std::sqrt(rnum / rden) <= 1e-8);

    std::vector<double> yw = z;
    for (index_t j = 0; j < n; ++j) {
        yw[j] /= lw(j, j);
        for (index_t i = j + 1; i < n; ++i) yw[i] -= lw(i, j) * yw[j];
    }
    double dnum = 0.0, dden = 0.0;
    for (index_t i = 0; i < n; ++i) {
        dnum += (y[i] - yw[i]) * (y[i] - yw[i]);
        dden += yw[i] * yw[i];
    }
    CHECK(std::sqrt(dnum / dden) <= 1e-5);
}

TEST_CASE("tlr_potrf is identical across thread counts") {
    auto locs = generate_uniform_locations(300, 15);
    auto model = matern_model(1.0, 0.15, 0.5);
    util::set_num_threads(1);
    auto f1 = tlr::tlr_potrf(tlr::compress_covariance(locs, model, 75, 1e-7));
    util::set_num_threads(3);
    auto f2 = tlr::tlr_potrf(tlr::compress_covariance(locs, model, 75, 1e-7));
    util::set_num_threads(1);
    for (index_t t = 0; t < f1.grid(); ++t)
        for (index_t c = 0; c < f1.m.diag(t).size(); ++c)
            CHECK(f1.m.diag(t).data()[c] == f2.m.diag(t).data()[c]);
    for (index_t i = 0; i < f1.grid(); ++i)
        for (index_t j = 0; j < i; ++j) {
            REQUIRE(f1.m.low(i, j).rank() == f2.m.low(i, j).rank());
            for (index_t c = 0; c < f1.m.low(i, j).u.size(); ++c)
                CHECK(f1.m.low(i, j).u.data()[c] == f2.m.low(i, j).u.data()[c]);
        }
}

TEST_CASE("non-PD input reports the failing tile") {
    cov::TiledDenseMatrix bad(20, 10);
    for (index_t i = 0; i < 20; ++i) bad.tile(i / 10, i / 10)(i % 10, i % 10) = 1.0;
    bad.tile(1, 1)(7, 7) = -3.0; // poison the second diagonal tile
    bool threw = false;
    try {
        tlr::tlr_potrf(tlr::compress_matrix(bad, 1e-7));
    } catch (const factorization_error& e) {
        threw = true;
        CHECK(e.tile() == 1);
        CHECK(e.pivot() == 7);
    }
    CHECK(threw);
}

TEST_CASE("time_factorization reports a sane median over runs") {
    auto locs = generate_uniform_locations(200, 2);
    auto model = matern_model(1.0, 0.1, 0.5);
    auto tlrm = tlr::compress_covariance(locs, model, 50, 1e-7);
    auto rec = tlr::time_factorization(tlrm, 3, KernelId::matern, model.matern);
    CHECK(rec.runs == 3);
    CHECK(rec.seconds.size() == 3);
    CHECK(rec.median_seconds > 0.0);
    CHECK(rec.median_seconds >= *std::min_element(rec.seconds.begin(), rec.seconds.end()));
    CHECK(rec.median_seconds <= *std::max_element(rec.seconds.begin(), rec.seconds.end()));
    auto json = tlr::timing_record_json(rec);
    CHECK(json.find("\"median_seconds\"") != std::string::npos);
    CHECK(json.find("\"runs\": 3") != std::string::npos);
}

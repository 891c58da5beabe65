#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "tlrgeo/linalg/dense.hpp"
#include "tlrgeo/simd/simd.hpp"
#include "tlrgeo/tlr/factor.hpp"
#include "tlrgeo/util/parallel.hpp"

namespace tlrgeo::tlr {

using linalg::Matrix;

LowRankTile recompress_sum(const LowRankTile& a, const LowRankTile& b, double epsilon) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("recompress_sum: tile shape mismatch");
    if (b.rank() == 0) return a;
    if (a.rank() == 0) return b;

    index_t m = a.rows(), n = a.cols();
    index_t ra = a.rank(), rb = b.rank();
    if (ra + rb >= std::min(m, n)) {
        // combined rank covers the whole tile; an exact dense sum is cheaper
        // and error-free (a full-width SVD here would dominate the runtime)
        Matrix sum = reconstruct_tile(a);
        Matrix badd = reconstruct_tile(b);
        for (index_t i = 0; i < sum.size(); ++i) sum.data()[i] += badd.data()[i];
        return exact_tile(sum);
    }
    Matrix u(m, ra + rb), v(n, ra + rb);
    std::copy(a.u.data(), a.u.data() + a.u.size(), u.data());
    std::copy(b.u.data(), b.u.data() + b.u.size(), u.data() + a.u.size());
    std::copy(a.v.data(), a.v.data() + a.v.size(), v.data());
    std::copy(b.v.data(), b.v.data() + b.v.size(), v.data() + a.v.size());

    auto qu = linalg::qr_thin(std::move(u));
    auto qv = linalg::qr_thin(std::move(v));
    Matrix core = linalg::matmul_nt(qu.r, qv.r);
    auto svd = linalg::jacobi_svd(std::move(core));

    double s1 = svd.s.empty() ? 0.0 : svd.s[0];
    // U columns carry the singular values, so the leading column norms bound
    // sigma_1 of the inputs; a sum collapsing this far below them is exact
    // cancellation at working precision.
    double scale_a = std::sqrt(simd::dot(m, a.u.col(0), a.u.col(0)));
    double scale_b = std::sqrt(simd::dot(m, b.u.col(0), b.u.col(0)));
    double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(scale_a, scale_b);
    if (s1 <= floor) return LowRankTile::zero(m, n);

    index_t r = 0;
    for (double s : svd.s)
        if (s > epsilon * s1) ++r; else break;

    LowRankTile out;
    out.u = Matrix(m, r);
    out.v = Matrix(n, r);
    if (r > 0) {
        Matrix us(svd.u.rows(), r);
        for (index_t j = 0; j < r; ++j)
            for (index_t i = 0; i < us.rows(); ++i) us(i, j) = svd.u(i, j) * svd.s[j];
        linalg::gemm(false, false, 1.0, qu.q, us, 0.0, out.u);
        Matrix vr(svd.v.rows(), r);
        for (index_t j = 0; j < r; ++j)
            std::copy(svd.v.col(j), svd.v.col(j) + svd.v.rows(), vr.col(j));
        linalg::gemm(false, false, 1.0, qv.q, vr, 0.0, out.v);
    }
    return out;
}

namespace {

// A_ik A_jk^T = U_ik (V_ik^T V_jk) U_jk^T, folded to rank min(r_ik, r_jk);
// the minus sign of the Schur update lands in the U factor.
LowRankTile gemm_update_term(const LowRankTile& aik, const LowRankTile& ajk) {
    Matrix m = linalg::matmul_tn(aik.v, ajk.v); // r_ik x r_jk
    LowRankTile term;
    if (aik.rank() <= ajk.rank()) {
        term.u = Matrix(aik.u.rows(), aik.rank());
        std::copy(aik.u.data(), aik.u.data() + aik.u.size(), term.u.data());
        simd::scal(term.u.size(), -1.0, term.u.data());
        term.v = linalg::matmul_nt(ajk.u, m); // rows_j x r_ik
    } else {
        term.u = linalg::matmul(aik.u, m); // rows_i x r_jk
        simd::scal(term.u.size(), -1.0, term.u.data());
        term.v = Matrix(ajk.u.rows(), ajk.rank());
        std::copy(ajk.u.data(), ajk.u.data() + ajk.u.size(), term.v.data());
    }
    return term;
}

} // namespace

TlrCholeskyFactor tlr_potrf(TlrMatrix a) {
    index_t nt = a.grid();
    double eps = a.epsilon();
    for (index_t k = 0; k < nt; ++k) {
        linalg::potrf_lower(a.diag(k), k);

        // column update: tile_ik <- tile_ik L_kk^{-T}  (V <- L_kk^{-1} V)
        util::parallel_for(nt - k - 1, [&](index_t t) {
            LowRankTile& aik = a.low(k + 1 + t, k);
            if (aik.rank() > 0) linalg::trsm_lower_left(a.diag(k), aik.v);
        });

        // trailing Schur updates, one task per target tile
        std::vector<std::pair<index_t, index_t>> tasks;
        for (index_t i = k + 1; i < nt; ++i)
            for (index_t j = k + 1; j <= i; ++j) tasks.emplace_back(i, j);
        util::parallel_for(static_cast<index_t>(tasks.size()), [&](index_t t) {
            auto [i, j] = tasks[t];
            const LowRankTile& aik = a.low(i, k);
            if (aik.rank() == 0) return;
            if (i == j) {
                // D_i -= U (V^T V) U^T
                Matrix w = linalg::matmul_tn(aik.v, aik.v);
                Matrix uw = linalg::matmul(aik.u, w);
                linalg::gemm(false, true, -1.0, uw, aik.u, 1.0, a.diag(i));
            } else {
                const LowRankTile& ajk = a.low(j, k);
                if (ajk.rank() == 0) return;
                a.low(i, j) = recompress_sum(a.low(i, j), gemm_update_term(aik, ajk), eps);
            }
        });
    }
    return TlrCholeskyFactor{std::move(a)};
}

std::vector<double> tlr_trsv(const TlrCholeskyFactor& l, const std::vector<double>& b) {
    const TlrMatrix& m = l.m;
    if (static_cast<index_t>(b.size()) != m.n())
        throw std::invalid_argument("tlr_trsv: dimension mismatch");
    std::vector<double> y = b;
    index_t nt = m.grid();
    std::vector<double> t;
    for (index_t i = 0; i < nt; ++i) {
        double* yi = y.data() + i * m.nb();
        index_t szi = m.tile_size(i);
        for (index_t j = 0; j < i; ++j) {
            const LowRankTile& lij = m.low(i, j);
            if (lij.rank() == 0) continue;
            const double* yj = y.data() + j * m.nb();
            t.assign(lij.rank(), 0.0);
            simd::gemm(true, false, lij.rank(), 1, lij.cols(), 1.0, lij.v.data(), lij.cols(),
                       yj, lij.cols(), 0.0, t.data(), lij.rank());
            simd::gemm(false, false, szi, 1, lij.rank(), -1.0, lij.u.data(), szi, t.data(),
                       lij.rank(), 1.0, yi, szi);
        }
        linalg::trsv_lower(m.diag(i), yi);
    }
    return y;
}

double logdet(const TlrCholeskyFactor& l) {
    double sum = 0.0;
    for (index_t i = 0; i < l.grid(); ++i) {
        const Matrix& d = l.m.diag(i);
        for (index_t j = 0; j < d.rows(); ++j) {
            double v = d(j, j);
            if (!(v > 0.0)) throw factorization_error(i, j, v);
            sum += std::log(v);
        }
    }
    return 2.0 * sum;
}

TimingRecord time_factorization(const TlrMatrix& a, int runs, KernelId kernel,
                                const MaternParams& params) {
    if (runs < 1) throw std::invalid_argument("time_factorization: runs must be >= 1");
    TimingRecord rec;
    rec.n = a.n();
    rec.nb = a.nb();
    rec.epsilon = a.epsilon();
    rec.ordering = a.ordering;
    rec.kernel = kernel;
    rec.params = params;
    rec.runs = runs;
    for (int r = 0; r < runs; ++r) {
        TlrMatrix copy = a;
        auto t0 = std::chrono::steady_clock::now();
        TlrCholeskyFactor f = tlr_potrf(std::move(copy));
        auto t1 = std::chrono::steady_clock::now();
        (void)f;
        rec.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::vector<double> sorted = rec.seconds;
    std::sort(sorted.begin(), sorted.end());
    size_t k = sorted.size();
    rec.median_seconds = (k % 2 == 1) ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
    return rec;
}

std::string timing_record_json(const TimingRecord& rec) {
    nlohmann::json j;
    j["n"] = rec.n;
    j["nb"] = rec.nb;
    j["epsilon"] = rec.epsilon;
    j["ordering"] = to_string(rec.ordering);
    j["kernel"] = to_string(rec.kernel);
    j["params"] = {{"sigma2", rec.params.sigma2}, {"beta", rec.params.beta}, {"nu", rec.params.nu}};
    j["median_seconds"] = rec.median_seconds;
    j["runs"] = rec.runs;
    j["seconds"] = rec.seconds;
    return j.dump(2);
}

} // namespace tlrgeo::tlr

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tlrgeo/linalg/dense.hpp"
#include "tlrgeo/rng.hpp"
#include "tlrgeo/simd/simd.hpp"

namespace tlrgeo::linalg {

void gemm(bool trans_a, bool trans_b, double alpha, const Matrix& a, const Matrix& b,
          double beta, Matrix& c) {
    index_t m = trans_a ? a.cols() : a.rows();
    index_t k = trans_a ? a.rows() : a.cols();
    index_t kb = trans_b ? b.cols() : b.rows();
    index_t n = trans_b ? b.rows() : b.cols();
    if (k != kb || c.rows() != m || c.cols() != n)
        throw std::invalid_argument("gemm: dimension mismatch");
    simd::gemm(trans_a, trans_b, m, n, k, alpha, a.data(), a.rows(), b.data(), b.rows(),
               beta, c.data(), c.rows());
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    gemm(false, false, 1.0, a, b, 0.0, c);
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.rows());
    gemm(false, true, 1.0, a, b, 0.0, c);
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    Matrix c(a.cols(), b.cols());
    gemm(true, false, 1.0, a, b, 0.0, c);
    return c;
}

namespace {

constexpr index_t kPotrfBlock = 64;

// Unblocked right-looking Cholesky on the [j0, j0+nb) diagonal window.
void potrf_unblocked(Matrix& a, index_t j0, index_t nb, index_t tile_index) {
    for (index_t j = j0; j < j0 + nb; ++j) {
        double piv = a(j, j);
        if (!(piv > 0.0)) throw factorization_error(tile_index, j, piv);
        piv = std::sqrt(piv);
        a(j, j) = piv;
        index_t below = j0 + nb - j - 1;
        if (below > 0) simd::scal(below, 1.0 / piv, &a(j + 1, j));
        for (index_t k = j + 1; k < j0 + nb; ++k) {
            double l = a(k, j);
            if (l != 0.0) simd::axpy(j0 + nb - k, -l, &a(k, j), &a(k, k));
        }
    }
}

} // namespace

void potrf_lower(Matrix& a, index_t tile_index) {
    index_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("potrf: matrix must be square");
    for (index_t j = 0; j < n; j += kPotrfBlock) {
        index_t nb = std::min(kPotrfBlock, n - j);
        // left-looking update of the panel from already-factored columns
        if (j > 0) {
            simd::gemm(false, true, n - j, nb, j, -1.0, &a(j, 0), n, &a(j, 0), n,
                       1.0, &a(j, j), n);
        }
        potrf_unblocked(a, j, nb, tile_index);
        if (j + nb < n) {
            Matrix ljj(nb, nb);
            for (index_t c = 0; c < nb; ++c)
                for (index_t r = c; r < nb; ++r) ljj(r, c) = a(j + r, j + c);
            trsm_lower_right_trans(ljj, &a(j + nb, j), n - j - nb, n);
        }
    }
}

void trsm_lower_right_trans(const Matrix& l, double* b, index_t m, index_t ldb) {
    index_t k = l.rows();
    for (index_t j = 0; j < k; ++j) {
        double* bj = b + j * ldb;
        for (index_t i = 0; i < j; ++i) {
            double lji = l(j, i);
            if (lji != 0.0) simd::axpy(m, -lji, b + i * ldb, bj);
        }
        simd::scal(m, 1.0 / l(j, j), bj);
    }
}

void trsm_lower_left(const Matrix& l, Matrix& x) {
    index_t n = l.rows();
    if (x.rows() != n) throw std::invalid_argument("trsm: dimension mismatch");
    constexpr index_t kBlock = 64;
    for (index_t j0 = 0; j0 < n; j0 += kBlock) {
        index_t nb = std::min(kBlock, n - j0);
        // solve the diagonal block for every RHS column
        for (index_t c = 0; c < x.cols(); ++c) {
            double* xc = x.col(c);
            for (index_t j = j0; j < j0 + nb; ++j) {
                double v = xc[j] / l(j, j);
                xc[j] = v;
                index_t below = j0 + nb - j - 1;
                if (below > 0 && v != 0.0) simd::axpy(below, -v, l.col(j) + j + 1, xc + j + 1);
            }
        }
        // trailing update
        if (j0 + nb < n) {
            simd::gemm(false, false, n - j0 - nb, x.cols(), nb, -1.0, l.col(j0) + j0 + nb, n,
                       &x(j0, 0), x.rows(), 1.0, &x(j0 + nb, 0), x.rows());
        }
    }
}

void trsv_lower(const Matrix& l, double* x) {
    index_t n = l.rows();
    for (index_t j = 0; j < n; ++j) {
        double v = x[j] / l(j, j);
        x[j] = v;
        if (v != 0.0 && j + 1 < n) simd::axpy(n - j - 1, -v, l.col(j) + j + 1, x + j + 1);
    }
}

void trmv_lower(const Matrix& l, const double* x, double* y) {
    index_t n = l.rows();
    std::fill(y, y + n, 0.0);
    for (index_t j = 0; j < n; ++j) {
        double xj = x[j];
        if (xj != 0.0) simd::axpy(n - j, xj, l.col(j) + j, y + j);
    }
}

QrResult qr_thin(Matrix a) {
    index_t m = a.rows();
    index_t n = a.cols();
    index_t p = std::min(m, n);
    std::vector<double> tau(p, 0.0);

    for (index_t j = 0; j < p; ++j) {
        double* col = a.col(j) + j;
        index_t len = m - j;
        double norm = std::sqrt(simd::dot(len, col, col));
        if (norm == 0.0) { tau[j] = 0.0; continue; }
        double alpha = col[0];
        double beta = (alpha >= 0.0) ? -norm : norm;
        double v0 = alpha - beta;
        // v normalized so v[0] = 1; tau = (beta - alpha)/beta
        simd::scal(len - 1, 1.0 / v0, col + 1);
        tau[j] = (beta - alpha) / beta;
        col[0] = beta;
        // apply H = I - tau v v^T to trailing columns
        for (index_t c = j + 1; c < n; ++c) {
            double* ac = a.col(c) + j;
            double w = ac[0] + simd::dot(len - 1, col + 1, ac + 1);
            w *= tau[j];
            ac[0] -= w;
            simd::axpy(len - 1, -w, col + 1, ac + 1);
        }
    }

    QrResult out;
    out.r = Matrix(p, n);
    for (index_t j = 0; j < n; ++j)
        for (index_t i = 0; i <= std::min(j, p - 1); ++i) out.r(i, j) = a(i, j);

    // backward accumulation of the thin Q
    out.q = Matrix(m, p);
    for (index_t j = 0; j < p; ++j) out.q(j, j) = 1.0;
    for (index_t j = p - 1; j >= 0; --j) {
        const double* v = a.col(j) + j; // v[0] treated as 1
        index_t len = m - j;
        if (tau[j] == 0.0) continue;
        for (index_t c = j; c < p; ++c) {
            double* qc = out.q.col(c) + j;
            double w = qc[0] + simd::dot(len - 1, v + 1, qc + 1);
            w *= tau[j];
            qc[0] -= w;
            simd::axpy(len - 1, -w, v + 1, qc + 1);
        }
    }
    return out;
}

SvdResult jacobi_svd(Matrix a) {
    bool transposed = a.rows() < a.cols();
    if (transposed) {
        Matrix t(a.cols(), a.rows());
        for (index_t j = 0; j < a.cols(); ++j)
            for (index_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
        a = std::move(t);
    }
    index_t m = a.rows();
    index_t n = a.cols();
    Matrix v = Matrix::identity(n);

    constexpr double kTol = 1e-15;
    constexpr int kMaxSweeps = 42;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        index_t rotated = 0;
        for (index_t p = 0; p + 1 < n; ++p) {
            for (index_t q = p + 1; q < n; ++q) {
                double* ap = a.col(p);
                double* aq = a.col(q);
                double app = simd::dot(m, ap, ap);
                double aqq = simd::dot(m, aq, aq);
                double apq = simd::dot(m, ap, aq);
                if (std::abs(apq) <= kTol * std::sqrt(app * aqq) || apq == 0.0) continue;
                ++rotated;
                double zeta = (aqq - app) / (2.0 * apq);
                double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                simd::rot(m, ap, aq, c, s);
                simd::rot(n, v.col(p), v.col(q), c, s);
            }
        }
        if (rotated == 0) break;
    }

    SvdResult out;
    out.s.resize(n);
    out.u = Matrix(m, n);
    for (index_t j = 0; j < n; ++j) {
        double norm = std::sqrt(simd::dot(m, a.col(j), a.col(j)));
        out.s[j] = norm;
        if (norm > 0.0) {
            double inv = 1.0 / norm;
            for (index_t i = 0; i < m; ++i) out.u(i, j) = a(i, j) * inv;
        }
    }

    // sort by descending singular value
    std::vector<index_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](index_t x, index_t y) { return out.s[x] > out.s[y]; });
    SvdResult sorted;
    sorted.s.resize(n);
    sorted.u = Matrix(m, n);
    sorted.v = Matrix(n, n);
    for (index_t j = 0; j < n; ++j) {
        sorted.s[j] = out.s[order[j]];
        std::copy(out.u.col(order[j]), out.u.col(order[j]) + m, sorted.u.col(j));
        std::copy(v.col(order[j]), v.col(order[j]) + n, sorted.v.col(j));
    }
    if (transposed) std::swap(sorted.u, sorted.v);
    return sorted;
}

double frobenius_norm(const Matrix& a) {
    return std::sqrt(simd::dot(a.size(), a.data(), a.data()));
}

double spectral_norm_estimate(const Matrix& a, int iterations) {
    index_t n = a.cols();
    if (n == 0 || a.rows() == 0) return 0.0;
    double best = 0.0;
    Rng rng(0x5fec7, 0);
    std::vector<double> z(n), w(a.rows());
    for (int start = 0; start < 2; ++start) {
        for (auto& zi : z) zi = rng.normal();
        double sigma = 0.0;
        for (int it = 0; it < iterations; ++it) {
            double nz = std::sqrt(simd::dot(n, z.data(), z.data()));
            if (nz == 0.0) break;
            simd::scal(n, 1.0 / nz, z.data());
            simd::gemm(false, false, a.rows(), 1, n, 1.0, a.data(), a.rows(), z.data(), n,
                       0.0, w.data(), a.rows());
            simd::gemm(true, false, n, 1, a.rows(), 1.0, a.data(), a.rows(), w.data(),
                       a.rows(), 0.0, z.data(), n);
            // z was unit length, so ||A^T A z|| ~ sigma_max^2
            sigma = std::sqrt(std::sqrt(simd::dot(n, z.data(), z.data())));
        }
        best = std::max(best, sigma);
    }
    return best;
}

} // namespace tlrgeo::linalg

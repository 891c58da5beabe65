#include <cmath>

#include "tlrgeo/simd/simd.hpp"
#include "tlrgeo/simd/exp_poly.hpp"

namespace tlrgeo::simd::scalar {

double dot(index_t n, const double* x, const double* y) noexcept {
    double s = 0.0;
    for (index_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(index_t n, double a, const double* x, double* y) noexcept {
    for (index_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal(index_t n, double a, double* x) noexcept {
    for (index_t i = 0; i < n; ++i) x[i] *= a;
}

void rot(index_t n, double* x, double* y, double c, double s) noexcept {
    for (index_t i = 0; i < n; ++i) {
        double xi = x[i], yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

void exp_vec(index_t n, const double* x, double* y) noexcept {
    for (index_t i = 0; i < n; ++i) y[i] = detail::exp_one(x[i]);
}

void sqrt_vec(index_t n, const double* x, double* y) noexcept {
    for (index_t i = 0; i < n; ++i) y[i] = std::sqrt(x[i]);
}

namespace {

inline double elem(const double* a, index_t lda, bool trans, index_t i, index_t j) noexcept {
    return trans ? a[j + i * lda] : a[i + j * lda];
}

} // namespace

void gemm(bool trans_a, bool trans_b, index_t m, index_t n, index_t k,
          double alpha, const double* a, index_t lda,
          const double* b, index_t ldb,
          double beta, double* c, index_t ldc) noexcept {
    for (index_t j = 0; j < n; ++j) {
        double* cj = c + j * ldc;
        if (beta == 0.0) {
            for (index_t i = 0; i < m; ++i) cj[i] = 0.0;
        } else if (beta != 1.0) {
            for (index_t i = 0; i < m; ++i) cj[i] *= beta;
        }
        if (!trans_a) {
            // accumulate along k with contiguous columns of A
            for (index_t l = 0; l < k; ++l) {
                double blj = alpha * elem(b, ldb, trans_b, l, j);
                if (blj == 0.0) continue;
                const double* al = a + l * lda;
                for (index_t i = 0; i < m; ++i) cj[i] += blj * al[i];
            }
        } else {
            for (index_t i = 0; i < m; ++i) {
                const double* ai = a + i * lda; // column i of A holds row i of op(A)
                double s = 0.0;
                if (!trans_b) {
                    const double* bj = b + j * ldb;
                    for (index_t l = 0; l < k; ++l) s += ai[l] * bj[l];
                } else {
                    for (index_t l = 0; l < k; ++l) s += ai[l] * b[j + l * ldb];
                }
                cj[i] += alpha * s;
            }
        }
    }
}

} // namespace tlrgeo::simd::scalar

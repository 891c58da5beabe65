#pragma once

#include "tlrgeo/linalg/matrix.hpp"

namespace tlrgeo::linalg {

// C = alpha * op(A) * op(B) + beta * C
void gemm(bool trans_a, bool trans_b, double alpha, const Matrix& a, const Matrix& b,
          double beta, Matrix& c);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b); // A * B^T
Matrix matmul_tn(const Matrix& a, const Matrix& b); // A^T * B

// In-place lower Cholesky of a symmetric positive definite matrix; the strict
// upper triangle is left untouched. Throws factorization_error with the
// failing pivot row (tile index fixed to `tile_index` for error reporting).
void potrf_lower(Matrix& a, index_t tile_index = 0);

// X <- L^{-1} X for lower-triangular L (forward substitution, multiple RHS).
void trsm_lower_left(const Matrix& l, Matrix& x);
// x <- L^{-1} x, single vector.
void trsv_lower(const Matrix& l, double* x);
// B <- B * L^{-T}: used by blocked potrf panels.
void trsm_lower_right_trans(const Matrix& l, double* b, index_t m, index_t ldb);

// y = L * x for lower-triangular L stored in a full matrix.
void trmv_lower(const Matrix& l, const double* x, double* y);

// Thin Householder QR: A (m x n) = Q (m x min(m,n)) * R (min(m,n) x n).
struct QrResult {
    Matrix q;
    Matrix r;
};
QrResult qr_thin(Matrix a);

struct SvdResult {
    Matrix u;              // m x p (orthonormal columns)
    std::vector<double> s; // p singular values, descending
    Matrix v;              // n x p
};

// One-sided Jacobi SVD; intended for the small cores that arise in low-rank
// truncation (dimensions up to a few hundred).
SvdResult jacobi_svd(Matrix a);

double frobenius_norm(const Matrix& a);
// Largest singular value via power iteration on A^T A (estimate, two starts).
double spectral_norm_estimate(const Matrix& a, int iterations = 20);

} // namespace tlrgeo::linalg

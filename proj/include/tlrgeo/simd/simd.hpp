#pragma once

#include <cstdint>
#include <string>

#include "tlrgeo/common.hpp"

namespace tlrgeo::simd {

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa) noexcept;
bool supported(Isa isa) noexcept;

// Active instruction set. Detected once at startup (highest supported),
// overridable via set_active() or the TLRGEO_ISA environment variable
// ("scalar" or "avx2").
Isa active() noexcept;
void set_active(Isa isa);

// ---- dispatched kernels ---------------------------------------------------
// Pointwise kernels (exp_vec, sqrt_vec) produce bit-identical results on every
// ISA: all variants evaluate the same polynomial / hardware sqrt per element.
// Reduction kernels (dot, gemm) may differ across ISAs at rounding level
// because SIMD variants keep multiple partial accumulators.

double dot(index_t n, const double* x, const double* y) noexcept;
void axpy(index_t n, double a, const double* x, double* y) noexcept;
void scal(index_t n, double a, double* x) noexcept;
// plane rotation: (x, y) <- (c*x - s*y, s*x + c*y)
void rot(index_t n, double* x, double* y, double c, double s) noexcept;
void exp_vec(index_t n, const double* x, double* y) noexcept;
void sqrt_vec(index_t n, const double* x, double* y) noexcept;

// C = alpha * op(A) * op(B) + beta * C, column-major with leading dimensions.
// op(A) is m x k, op(B) is k x n.
void gemm(bool trans_a, bool trans_b, index_t m, index_t n, index_t k,
          double alpha, const double* a, index_t lda,
          const double* b, index_t ldb,
          double beta, double* c, index_t ldc) noexcept;

// ---- per-ISA entry points (used by the equivalence tests) -----------------

namespace scalar {
double dot(index_t n, const double* x, const double* y) noexcept;
void axpy(index_t n, double a, const double* x, double* y) noexcept;
void scal(index_t n, double a, double* x) noexcept;
void rot(index_t n, double* x, double* y, double c, double s) noexcept;
void exp_vec(index_t n, const double* x, double* y) noexcept;
void sqrt_vec(index_t n, const double* x, double* y) noexcept;
void gemm(bool trans_a, bool trans_b, index_t m, index_t n, index_t k,
          double alpha, const double* a, index_t lda,
          const double* b, index_t ldb,
          double beta, double* c, index_t ldc) noexcept;
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(index_t n, const double* x, const double* y) noexcept;
void axpy(index_t n, double a, const double* x, double* y) noexcept;
void scal(index_t n, double a, double* x) noexcept;
void rot(index_t n, double* x, double* y, double c, double s) noexcept;
void exp_vec(index_t n, const double* x, double* y) noexcept;
void sqrt_vec(index_t n, const double* x, double* y) noexcept;
void gemm(bool trans_a, bool trans_b, index_t m, index_t n, index_t k,
          double alpha, const double* a, index_t lda,
          const double* b, index_t ldb,
          double beta, double* c, index_t ldc) noexcept;
} // namespace avx2
#endif

} // namespace tlrgeo::simd

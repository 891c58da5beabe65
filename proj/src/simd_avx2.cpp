// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma -ffp-contract=off; everything else in the library stays at the
// baseline ISA. Pointwise kernels mirror the scalar reference operation for
// operation so results are bit-identical across ISAs; dot/gemm use multiple
// accumulators and are only reproducible per ISA.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstring>
#include <vector>

#include "tlrgeo/simd/simd.hpp"
#include "tlrgeo/simd/exp_poly.hpp"

namespace tlrgeo::simd::avx2 {

double dot(index_t n, const double* x, const double* y) noexcept {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    index_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    __m256d acc = _mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3));
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    lo = _mm_add_pd(lo, hi);
    double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(index_t n, double a, const double* x, double* y) noexcept {
    __m256d va = _mm256_set1_pd(a);
    index_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_add_pd(_mm256_loadu_pd(y + i),
                                  _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, t);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scal(index_t n, double a, double* x) noexcept {
    __m256d va = _mm256_set1_pd(a);
    index_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void rot(index_t n, double* x, double* y, double c, double s) noexcept {
    __m256d vc = _mm256_set1_pd(c);
    __m256d vs = _mm256_set1_pd(s);
    index_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xi = _mm256_loadu_pd(x + i);
        __m256d yi = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(x + i, _mm256_sub_pd(_mm256_mul_pd(vc, xi), _mm256_mul_pd(vs, yi)));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_mul_pd(vs, xi), _mm256_mul_pd(vc, yi)));
    }
    for (; i < n; ++i) {
        double xi = x[i], yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

void sqrt_vec(index_t n, const double* x, double* y) noexcept {
    index_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_sqrt_pd(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = __builtin_sqrt(x[i]);
}

namespace {

inline __m256d exp4(__m256d x) noexcept {
    using namespace tlrgeo::simd::detail;
    const __m256d log2e = _mm256_set1_pd(kExpLog2e);
    const __m256d ln2hi = _mm256_set1_pd(kExpLn2Hi);
    const __m256d ln2lo = _mm256_set1_pd(kExpLn2Lo);

    __m256d nf = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                 _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(nf, ln2hi));
    r = _mm256_sub_pd(r, _mm256_mul_pd(nf, ln2lo));

    __m256d p = _mm256_set1_pd(kExpPoly[0]);
    for (int i = 1; i < 14; ++i)
        p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(kExpPoly[i]));

    // 2^n via exponent bits, split in two factors (n = n1 + n2, n1 = n >> 1)
    __m128i n = _mm256_cvtpd_epi32(nf);
    __m128i n1 = _mm_srai_epi32(n, 1);
    __m128i n2 = _mm_sub_epi32(n, n1);
    const __m256i bias = _mm256_set1_epi64x(1023);
    __m256i e1 = _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(n1), bias), 52);
    __m256i e2 = _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(n2), bias), 52);
    p = _mm256_mul_pd(_mm256_mul_pd(p, _mm256_castsi256_pd(e1)), _mm256_castsi256_pd(e2));

    __m256d inf = _mm256_set1_pd(__builtin_huge_val());
    __m256d over = _mm256_cmp_pd(x, _mm256_set1_pd(kExpOverflow), _CMP_GT_OQ);
    __m256d under = _mm256_cmp_pd(x, _mm256_set1_pd(kExpUnderflow), _CMP_LT_OQ);
    p = _mm256_blendv_pd(p, inf, over);
    p = _mm256_andnot_pd(under, p);
    return p;
}

} // namespace

void exp_vec(index_t n, const double* x, double* y) noexcept {
    index_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, exp4(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = detail::exp_one(x[i]);
}

// ---- packed GEMM ----------------------------------------------------------

namespace {

constexpr index_t MR = 8;
constexpr index_t NR = 4;
constexpr index_t MC = 96;
constexpr index_t KC = 256;
constexpr index_t NC = 512;

inline double opa(const double* a, index_t lda, bool trans, index_t i, index_t l) noexcept {
    return trans ? a[l + i * lda] : a[i + l * lda];
}

// A strip: kc steps of MR contiguous rows, alpha folded in, zero padded.
void pack_a(const double* a, index_t lda, bool trans, double alpha,
            index_t ic, index_t pc, index_t mc, index_t kc, index_t m, double* buf) noexcept {
    for (index_t ip = 0; ip < mc; ip += MR) {
        double* dst = buf + ip * kc;
        index_t rows = (ic + ip + MR <= m) ? MR : (m - ic - ip);
        for (index_t l = 0; l < kc; ++l) {
            for (index_t r = 0; r < rows; ++r)
                dst[l * MR + r] = alpha * opa(a, lda, trans, ic + ip + r, pc + l);
            for (index_t r = rows; r < MR; ++r) dst[l * MR + r] = 0.0;
        }
    }
}

inline double opb(const double* b, index_t ldb, bool trans, index_t l, index_t j) noexcept {
    return trans ? b[j + l * ldb] : b[l + j * ldb];
}

// B strip: kc steps of NR values, zero padded.
void pack_b(const double* b, index_t ldb, bool trans,
            index_t pc, index_t jc, index_t kc, index_t nc, index_t n, double* buf) noexcept {
    for (index_t jp = 0; jp < nc; jp += NR) {
        double* dst = buf + jp * kc;
        index_t cols = (jc + jp + NR <= n) ? NR : (n - jc - jp);
        for (index_t l = 0; l < kc; ++l) {
            for (index_t cc = 0; cc < cols; ++cc)
                dst[l * NR + cc] = opb(b, ldb, trans, pc + l, jc + jp + cc);
            for (index_t cc = cols; cc < NR; ++cc) dst[l * NR + cc] = 0.0;
        }
    }
}

void micro_8x4(index_t kc, const double* pa, const double* pb,
               double* c, index_t ldc, index_t mr, index_t nr) noexcept {
    __m256d c00 = _mm256_setzero_pd(), c10 = _mm256_setzero_pd();
    __m256d c01 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
    __m256d c02 = _mm256_setzero_pd(), c12 = _mm256_setzero_pd();
    __m256d c03 = _mm256_setzero_pd(), c13 = _mm256_setzero_pd();
    for (index_t l = 0; l < kc; ++l) {
        __m256d a0 = _mm256_loadu_pd(pa);
        __m256d a1 = _mm256_loadu_pd(pa + 4);
        __m256d b0 = _mm256_broadcast_sd(pb + 0);
        __m256d b1 = _mm256_broadcast_sd(pb + 1);
        __m256d b2 = _mm256_broadcast_sd(pb + 2);
        __m256d b3 = _mm256_broadcast_sd(pb + 3);
        c00 = _mm256_fmadd_pd(a0, b0, c00);
        c10 = _mm256_fmadd_pd(a1, b0, c10);
        c01 = _mm256_fmadd_pd(a0, b1, c01);
        c11 = _mm256_fmadd_pd(a1, b1, c11);
        c02 = _mm256_fmadd_pd(a0, b2, c02);
        c12 = _mm256_fmadd_pd(a1, b2, c12);
        c03 = _mm256_fmadd_pd(a0, b3, c03);
        c13 = _mm256_fmadd_pd(a1, b3, c13);
        pa += MR;
        pb += NR;
    }
    __m256d lo[4] = {c00, c01, c02, c03};
    __m256d hi[4] = {c10, c11, c12, c13};
    if (mr == MR && nr == NR) {
        for (index_t j = 0; j < NR; ++j) {
            double* cj = c + j * ldc;
            _mm256_storeu_pd(cj, _mm256_add_pd(_mm256_loadu_pd(cj), lo[j]));
            _mm256_storeu_pd(cj + 4, _mm256_add_pd(_mm256_loadu_pd(cj + 4), hi[j]));
        }
    } else {
        double tmp[MR];
        for (index_t j = 0; j < nr; ++j) {
            _mm256_storeu_pd(tmp, lo[j]);
            _mm256_storeu_pd(tmp + 4, hi[j]);
            double* cj = c + j * ldc;
            for (index_t i = 0; i < mr; ++i) cj[i] += tmp[i];
        }
    }
}

thread_local std::vector<double> g_pack_a;
thread_local std::vector<double> g_pack_b;

} // namespace

void gemm(bool trans_a, bool trans_b, index_t m, index_t n, index_t k,
          double alpha, const double* a, index_t lda,
          const double* b, index_t ldb,
          double beta, double* c, index_t ldc) noexcept {
    if (m <= 0 || n <= 0) return;
    for (index_t j = 0; j < n; ++j) {
        double* cj = c + j * ldc;
        if (beta == 0.0)
            std::memset(cj, 0, static_cast<size_t>(m) * sizeof(double));
        else if (beta != 1.0)
            scal(m, beta, cj);
    }
    if (k <= 0 || alpha == 0.0) return;

    if (g_pack_a.size() < static_cast<size_t>(MC * KC)) g_pack_a.resize(MC * KC);
    if (g_pack_b.size() < static_cast<size_t>(KC * NC)) g_pack_b.resize(KC * NC);

    for (index_t jc = 0; jc < n; jc += NC) {
        index_t nc = (n - jc < NC) ? (n - jc) : NC;
        index_t ncp = (nc + NR - 1) / NR * NR;
        for (index_t pc = 0; pc < k; pc += KC) {
            index_t kc = (k - pc < KC) ? (k - pc) : KC;
            pack_b(b, ldb, trans_b, pc, jc, kc, ncp, n, g_pack_b.data());
            for (index_t ic = 0; ic < m; ic += MC) {
                index_t mc = (m - ic < MC) ? (m - ic) : MC;
                index_t mcp = (mc + MR - 1) / MR * MR;
                pack_a(a, lda, trans_a, alpha, ic, pc, mcp, kc, m, g_pack_a.data());
                for (index_t jp = 0; jp < nc; jp += NR) {
                    index_t nr = (nc - jp < NR) ? (nc - jp) : NR;
                    for (index_t ip = 0; ip < mc; ip += MR) {
                        index_t mr = (mc - ip < MR) ? (mc - ip) : MR;
                        micro_8x4(kc, g_pack_a.data() + ip * kc, g_pack_b.data() + jp * kc,
                                  c + (jc + jp) * ldc + (ic + ip), ldc, mr, nr);
                    }
                }
            }
        }
    }
}

} // namespace tlrgeo::simd::avx2

#endif // x86_64

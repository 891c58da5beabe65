#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "tlrgeo/simd/simd.hpp"

namespace tlrgeo::simd {

const char* to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "?";
}

bool supported(Isa isa) noexcept {
    if (isa == Isa::scalar) return true;
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Isa detect() noexcept {
    Isa isa = supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
    if (const char* env = std::getenv("TLRGEO_ISA")) {
        if (std::strcmp(env, "scalar") == 0) isa = Isa::scalar;
        else if (std::strcmp(env, "avx2") == 0 && supported(Isa::avx2)) isa = Isa::avx2;
    }
    return isa;
}

std::atomic<Isa> g_active{detect()};

} // namespace

Isa active() noexcept { return g_active.load(std::memory_order_relaxed); }

void set_active(Isa isa) {
    if (!supported(isa))
        throw std::invalid_argument(std::string("ISA not supported on this CPU: ") + to_string(isa));
    g_active.store(isa, std::memory_order_relaxed);
}

#if defined(__x86_64__) || defined(_M_X64)
#define TLRGEO_DISPATCH(fn, ...) \
    return active() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define TLRGEO_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double dot(index_t n, const double* x, const double* y) noexcept {
    TLRGEO_DISPATCH(dot, n, x, y);
}

void axpy(index_t n, double a, const double* x, double* y) noexcept {
    TLRGEO_DISPATCH(axpy, n, a, x, y);
}

void scal(index_t n, double a, double* x) noexcept {
    TLRGEO_DISPATCH(scal, n, a, x);
}

void rot(index_t n, double* x, double* y, double c, double s) noexcept {
    TLRGEO_DISPATCH(rot, n, x, y, c, s);
}

void exp_vec(index_t n, const double* x, double* y) noexcept {
    TLRGEO_DISPATCH(exp_vec, n, x, y);
}

void sqrt_vec(index_t n, const double* x, double* y) noexcept {
    TLRGEO_DISPATCH(sqrt_vec, n, x, y);
}

void gemm(bool trans_a, bool trans_b, index_t m, index_t n, index_t k,
          double alpha, const double* a, index_t lda,
          const double* b, index_t ldb,
          double beta, double* c, index_t ldc) noexcept {
    TLRGEO_DISPATCH(gemm, trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

} // namespace tlrgeo::simd

#pragma once

#include <cstdint>
#include <cstring>

// Shared exp() algorithm so the scalar reference and the SIMD lanes compute
// bit-identical results: argument reduction x = n*ln2 + r with |r| <= ln2/2,
// degree-13 Taylor polynomial for e^r, reconstruction by two power-of-two
// multiplies (the split keeps both factors in the normal exponent range, so
// gradual underflow behaves the same on every path).

namespace tlrgeo::simd::detail {

inline constexpr double kExpLog2e = 1.4426950408889634073599246810019;
inline constexpr double kExpLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kExpLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kExpOverflow = 709.0;
inline constexpr double kExpUnderflow = -745.0;

// 1/13!, 1/12!, ..., 1/2!, 1, 1 (Horner order, highest degree first)
inline constexpr double kExpPoly[14] = {
    1.6059043836821614599e-10, // 1/13!
    2.0876756987868098979e-09, // 1/12!
    2.5052108385441718775e-08, // 1/11!
    2.7557319223985890653e-07, // 1/10!
    2.7557319223985892511e-06, // 1/9!
    2.4801587301587301566e-05, // 1/8!
    1.9841269841269841253e-04, // 1/7!
    1.3888888888888889419e-03, // 1/6!
    8.3333333333333332177e-03, // 1/5!
    4.1666666666666664354e-02, // 1/4!
    1.6666666666666665741e-01, // 1/3!
    5.0000000000000000000e-01, // 1/2!
    1.0000000000000000000e+00,
    1.0000000000000000000e+00,
};

inline double pow2i(std::int64_t n) noexcept {
    std::uint64_t bits = static_cast<std::uint64_t>(n + 1023) << 52;
    double r;
    std::memcpy(&r, &bits, sizeof(r));
    return r;
}

inline double exp_one(double x) noexcept {
    if (x > kExpOverflow) return __builtin_huge_val();
    if (x < kExpUnderflow) return 0.0;
    double nf = __builtin_nearbyint(x * kExpLog2e);
    double r = x - nf * kExpLn2Hi;
    r -= nf * kExpLn2Lo;
    double p = kExpPoly[0];
    for (int i = 1; i < 14; ++i) p = p * r + kExpPoly[i];
    std::int64_t n = static_cast<std::int64_t>(nf);
    std::int64_t n1 = n >> 1;
    return p * pow2i(n1) * pow2i(n - n1);
}

} // namespace tlrgeo::simd::detail

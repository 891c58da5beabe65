#pragma once

#include <cstdint>
#include <cmath>

namespace tlrgeo {

// Philox4x32-10 counter-based generator. One project-wide generator keyed by
// (seed, stream) so that independent streams (locations, field noise, subset
// draws, ...) and independent replicates never share state: replicate r can be
// regenerated without replaying replicates 0..r-1.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          ctr2_(static_cast<std::uint32_t>(stream)),
          ctr3_(static_cast<std::uint32_t>(stream >> 32)) {}

    std::uint32_t next_u32() noexcept {
        if (have_ == 0) {
            block();
            have_ = 4;
        }
        return out_[4 - have_--];
    }

    std::uint64_t next_u64() noexcept {
        std::uint64_t lo = next_u32();
        std::uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    // uniform on (0,1), never exactly 0 or 1
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // standard normal via Box-Muller (pairs cached)
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint32_t mulhi(std::uint32_t a, std::uint32_t b, std::uint32_t& lo) noexcept {
        std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        lo = static_cast<std::uint32_t>(p);
        return static_cast<std::uint32_t>(p >> 32);
    }

    void block() noexcept {
        constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
        constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
        std::uint32_t c0 = ctr0_, c1 = ctr1_, c2 = ctr2_, c3 = ctr3_;
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            std::uint32_t lo0, lo1;
            std::uint32_t hi0 = mulhi(kM0, c0, lo0);
            std::uint32_t hi1 = mulhi(kM1, c2, lo1);
            std::uint32_t n0 = hi1 ^ c1 ^ k0;
            std::uint32_t n1 = lo1;
            std::uint32_t n2 = hi0 ^ c3 ^ k1;
            std::uint32_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += kW0; k1 += kW1;
        }
        out_[0] = c0; out_[1] = c1; out_[2] = c2; out_[3] = c3;
        if (++ctr0_ == 0) ++ctr1_;
    }

    std::uint32_t key0_, key1_;
    std::uint32_t ctr0_ = 0, ctr1_ = 0, ctr2_, ctr3_;
    std::uint32_t out_[4] = {0, 0, 0, 0};
    int have_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Fixed stream ids; keeping them in one place avoids accidental reuse.
namespace streams {
inline constexpr std::uint64_t kLocations = 0x10c5;
inline constexpr std::uint64_t kFieldNoise = 0xf1e1d;
inline constexpr std::uint64_t kSubset = 0x5e7;
inline constexpr std::uint64_t kCompressionProbe = 0xc04b;
} // namespace streams

} // namespace tlrgeo

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace cylou {

// Philox4x32-10 counter-based generator.
//
// Every variate sequence is a pure function of (seed, stream, counter), so
// parallel ensembles can hand one stream per path and reproduce bit-identical
// output under any scheduling. Key = seed, counter words = (draw counter,
// stream id); 2^64 draws per stream, 2^64 streams per seed.
class RngState {
public:
    RngState(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const auto block = philox_block(counter_++);
        spare_ = (static_cast<std::uint64_t>(block[3]) << 32) | block[2];
        have_spare_ = true;
        return (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
    }

    // Uniform strictly inside (0,1); safe to take logs of u and 1-u.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    double exponential() { return -std::log(uniform01()); }

    // Box-Muller, cosine branch only. Costs two uniforms per variate but keeps
    // the draw count of every caller fixed and obvious.
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // Knuth multiplication method; adequate for the small means used here.
    std::uint64_t poisson(double mean) {
        if (mean < 0.0 || !std::isfinite(mean))
            throw std::invalid_argument("poisson: mean must be finite and >= 0");
        if (mean == 0.0) return 0;
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = uniform01();
        while (p > limit) {
            ++k;
            p *= uniform01();
        }
        return k;
    }

private:
    static constexpr double two_pi = 6.283185307179586476925286766559;

    std::array<std::uint32_t, 4> philox_block(std::uint64_t draw) const {
        std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(draw),
            static_cast<std::uint32_t>(draw >> 32),
            static_cast<std::uint32_t>(stream_),
            static_cast<std::uint32_t>(stream_ >> 32),
        };
        std::array<std::uint32_t, 2> key = {
            static_cast<std::uint32_t>(seed_),
            static_cast<std::uint32_t>(seed_ >> 32),
        };
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ULL * ctr[0];
            const std::uint64_t p1 = 0xCD9E8D57ULL * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += 0x9E3779B9U;
            key[1] += 0xBB67AE85U;
        }
        return ctr;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

} // namespace cylou

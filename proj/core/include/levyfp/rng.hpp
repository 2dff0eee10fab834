#pragma once

#include <cstdint>
#include <cmath>

namespace levyfp {

// Deterministic, splittable random stream.
//
// Simulation results must be reproducible byte-for-byte for a given master
// seed regardless of worker count, so every unit of work (path, excursion
// window, table batch) draws from its own stream derived from
// (master_seed, stream_index).  The generator is xoshiro256++ seeded through
// splitmix64 — tiny state, cheap per-unit seeding, and a fully specified
// output sequence, none of which std:: distributions guarantee across
// standard library implementations.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index) {
        // splitmix64 walk over (seed, index) fills the four state words;
        // distinct (seed, index) pairs land in distinct, well mixed states.
        std::uint64_t x = master_seed ^ (0x9e3779b97f4a7c15ULL * (stream_index + 1));
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
        // xoshiro dislikes the all-zero state (cannot occur after splitmix64,
        // but keep the guard explicit).
        state_[0] |= 1;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits; never returns 1.0.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; never returns 0 (safe under log()).
    double uniform01_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard exponential.
    double exp1() { return -std::log(uniform01_pos()); }

    // Standard normal via Box-Muller.  The pair is consumed eagerly and the
    // second value cached, so a stream's draw sequence depends only on the
    // number of calls made on it.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(2.0 * exp1());
        const double theta = 6.283185307179586476925286766559 * uniform01();
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Poisson count by exponential inter-arrival accumulation; intended for
    // the small/moderate means that per-step jump counts produce.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 30.0) {
            const double limit = std::exp(-mean);
            std::uint64_t n = 0;
            double prod = uniform01_pos();
            while (prod > limit) {
                ++n;
                prod *= uniform01_pos();
            }
            return n;
        }
        // Large means: sum of independent halves keeps the multiplication
        // chain away from underflow.
        return poisson(mean * 0.5) + poisson(mean * 0.5);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace levyfp

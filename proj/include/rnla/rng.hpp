#pragma once

#include <cmath>
#include <cstdint>

namespace rnla {

// Algorithm identifier written into model manifests. Any change to the
// generator or to Gaussian sampling must bump this string.
inline constexpr const char* kRngAlgorithm = "splitmix64-boxmuller-v1";

// SplitMix64. 64-bit state, full-period, identical output on every platform.
class Splitmix64 {
public:
    explicit Splitmix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0, 1); never 0, safe under log().
    double next_open01() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // True with probability 1/2.
    bool next_bool() noexcept { return (next_u64() >> 63) != 0; }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) noexcept { return next_u64() % n; }

private:
    std::uint64_t state_;
};

// Standard-normal stream: Box-Muller over SplitMix64 uniforms. The second
// deviate of each pair is cached so consumption order is well defined.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) noexcept : rng_(seed) {}

    double next() noexcept {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.next_open01();
        const double u2 = rng_.next_open01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    Splitmix64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stable derivation of per-component seeds from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    Splitmix64 s(master ^ (0x517cc1b727220a95ULL + index));
    return s.next_u64();
}

} // namespace rnla

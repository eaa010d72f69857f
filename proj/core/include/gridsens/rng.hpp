#pragma once

#include <cmath>
#include <cstdint>

namespace gridsens {

/// SplitMix64 stream. Small, fast, and bit-reproducible across platforms,
/// which the simulation outputs require. Trial streams are derived from one
/// root seed by counter, so results do not depend on trial count or on how
/// work is split across workers.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1]; never returns 0 so log() stays finite.
    double uniform() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller. One value per call, cached pair.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Deterministic per-trial stream from a root seed and a counter.
    static SplitMix64 stream(std::uint64_t root_seed, std::uint64_t counter) {
        SplitMix64 mixer(root_seed ^ (0xA0761D6478BD642FULL * (counter + 1)));
        return SplitMix64(mixer.next());
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gridsens

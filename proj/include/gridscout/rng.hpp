// Deterministic random streams. One stream per (master seed, agent, tick)
// so results do not depend on worker count or call interleaving. splitmix64
// plus Box-Muller; standard-library distributions are avoided because their
// bit streams vary between implementations.
#pragma once

#include <cmath>
#include <cstdint>

namespace gridscout {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {
        // burn-in decorrelates nearby seeds
        splitmix64(state_);
        splitmix64(state_);
    }

    static RngStream for_agent_tick(std::uint64_t master_seed, int agent_id, std::int64_t tick) {
        std::uint64_t s = master_seed;
        splitmix64(s);
        s ^= 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(agent_id) + 1);
        splitmix64(s);
        s ^= 0xC2B2AE3D27D4EB4FULL * (static_cast<std::uint64_t>(tick) + 1);
        return RngStream(s);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // zero-mean gaussian with the given standard deviation
    double normal(double stddev) {
        if (stddev == 0.0) return 0.0;
        if (has_spare_) {
            has_spare_ = false;
            return spare_ * stddev;
        }
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = next_unit();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * 3.14159265358979323846 * u2;
        spare_ = mag * std::sin(ang);
        has_spare_ = true;
        return mag * std::cos(ang) * stddev;
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gridscout

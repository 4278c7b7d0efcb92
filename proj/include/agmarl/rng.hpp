#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace agmarl {

// splitmix64 finaliser; used to expand one user seed into stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for a named sub-stream. Streams are counter-indexed so adding a new
// stream never perturbs the draws of existing ones.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0) {
    return mix64(mix64(base ^ mix64(stream)) + index);
}

// Stream ids used across the project.
enum SeedStream : std::uint64_t {
    kSeedInit = 1,      // network weight initialisation
    kSeedEnv = 2,       // workload generation / arrival jitter
    kSeedNoise = 3,     // exploration noise
    kSeedSample = 4,    // replay sampling
};

// Deterministic RNG. The engine is std::mt19937_64 (standardised output
// sequence); uniform/normal transforms are local so results do not depend on
// the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0,1) with 53-bit resolution
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // inclusive bounds
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(uniform() * (static_cast<double>(hi) - lo + 1.0));
    }

    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace agmarl

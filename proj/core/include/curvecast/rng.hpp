#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace curvecast {

/// SplitMix64 mixing step, used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic sub-seed for stream `stream` of a master seed. Replicates,
/// holdout days and simulation replications each get their own stream so
/// results do not depend on evaluation order or thread count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

/// Seeded random generator with fixed algorithms for every draw type, so a
/// given seed produces the same stream on every platform and build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw in the open interval (0,1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (two uniforms per draw, no cached spare).
    double gaussian();

    /// Uniform integer in [0, n), rejection sampled.
    int uniform_int(int n);

    /// Fisher-Yates permutation of 0..n-1.
    std::vector<int> permutation(int n);

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace curvecast

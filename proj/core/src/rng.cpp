#include "curvecast/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace curvecast {

double Rng::gaussian() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int Rng::uniform_int(int n) {
    if (n <= 0) {
        throw std::invalid_argument("Rng::uniform_int: n must be positive");
    }
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return static_cast<int>(v % un);
}

std::vector<int> Rng::permutation(int n) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
        const int j = uniform_int(i + 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    return idx;
}

}  // namespace curvecast

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "pnsim/types.hpp"

namespace pnsim {

/// Stateless seed derivation: a pure function of its arguments, never of global state.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t geometry, std::uint64_t trial,
                          std::string_view stream);

/// One named random stream. Cheap to construct; copy to fork.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal() { return normal_(engine_); }
    double normal(double stddev) { return stddev * normal_(engine_); }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cd complex_normal(double variance = 1.0) {
        const double s = std::sqrt(0.5 * variance);
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {s * re, s * im};
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace pnsim

#include "memrl/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace memrl {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

Rng::Rng(std::uint64_t seed) : key_(mix(seed + kGolden)), counter_(0) {}

Rng Rng::split(std::uint64_t stream) const {
    return Rng(mix(key_ ^ mix(stream * kGolden + 0x632be59bd9b4e019ULL)), 0);
}

std::uint64_t Rng::next_u64() {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    // 1 - u keeps the log argument in (0, 1]
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::categorical(std::span<const double> weights) {
    if (weights.empty()) {
        throw std::invalid_argument("categorical: empty weight vector");
    }
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("categorical: weights must have positive mass");
    }
    const double u = uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) {
            continue;
        }
        acc += weights[i];
        last_positive = i;
        if (u < acc) {
            return i;
        }
    }
    // rounding can leave u just above the accumulated mass
    return last_positive;
}

} // namespace memrl

#pragma once

#include <cstdint>
#include <random>

namespace resmask {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Independent stream per (seed, component tag, optional index). Every
/// source of randomness in a run derives its own stream so a single
/// component's randomness can be varied in isolation.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index = 0) {
    return splitmix64(splitmix64(splitmix64(master) ^ tag) ^ index);
}

namespace seed_tag {
inline constexpr std::uint64_t kEnv = 0x01;
inline constexpr std::uint64_t kReservoir = 0x02;
inline constexpr std::uint64_t kMask = 0x03;
inline constexpr std::uint64_t kAgent = 0x04;
inline constexpr std::uint64_t kActions = 0x05;
inline constexpr std::uint64_t kEpisode = 0x06;
}  // namespace seed_tag

/// Deterministic generator wrapper. Distribution objects are constructed per
/// call so the mapping from engine state to values is fixed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
    int uniform_int(int n) { return std::uniform_int_distribution<int>(0, n - 1)(eng_); }
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 eng_;
};

}  // namespace resmask

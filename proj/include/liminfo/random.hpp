#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace liminfo {

/// Seedable pseudo-random stream. Sub-streams are obtained by hashing the
/// parent seed with an index, so a block of work can be replayed without
/// touching the parent's state.
class RandomStream {
public:
    static constexpr std::string_view algorithm_id = "mt19937_64+splitmix64-derive";

    explicit RandomStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    RandomStream derive(std::uint64_t index) const {
        return RandomStream(splitmix64(seed_ ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
    }

    /// Uniform on [0, 1).
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

    std::mt19937_64& engine() { return engine_; }

    static constexpr std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace liminfo

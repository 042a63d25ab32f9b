#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace alrnn {

/// Seeded generator with a named stream: the same (seed, name) pair always
/// produces the same sequence and different names give unrelated sequences.
class Rng
{
public:
    Rng(std::uint64_t seed, std::string_view stream);

    double normal(double sd) { return std::normal_distribution<double>(0.0, sd)(engine_); }
    double uniform(double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace alrnn

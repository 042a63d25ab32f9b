#pragma once

#include <alrnn/model.hpp>

#include <cstdint>

namespace alrnn {

enum class InitKind { normal, he, glorot, lecun };

/// Weight initialization; biases always start at zero.
struct InitSpec
{
    InitKind kind = InitKind::normal;
    double sd = 0.1; // only used by InitKind::normal

    /// "normal:<sd>", "he", "glorot" or "lecun".
    static InitSpec parse(std::string_view text);
    std::string name() const;

    /// Standard deviation for a rows x cols weight matrix (fan_in = cols).
    double stddev(Eigen::Index rows, Eigen::Index cols) const;
};

RnnParams init_params(const Dims& dims, const InitSpec& spec, std::uint64_t seed);

} // namespace alrnn

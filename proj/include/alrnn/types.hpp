#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace alrnn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Operand shapes disagree. The message names the offending operand.
class ShapeError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// A factorization or evaluation produced something non-finite.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Invalid user-facing configuration (parameter ranges, config files).
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Problem sizes: input width n, output width m, hidden width r and
/// sequence length T.
struct Dims
{
    int n = 0;
    int m = 0;
    int r = 0;
    int t_len = 0;

    /// Length of w = (vec(W); vec(V); b).
    int nw() const { return r * r + r * n + r; }
    /// Length of a = (vec(A); c).
    int na() const { return m * r + m; }
    int rt() const { return r * t_len; }

    void validate() const
    {
        if (n < 1 || m < 1 || r < 1 || t_len < 1) {
            throw ShapeError(
                "dims: n, m, r, T must all be >= 1 (got n=" + std::to_string(n) +
                " m=" + std::to_string(m) + " r=" + std::to_string(r) +
                " T=" + std::to_string(t_len) + ")");
        }
    }

    friend bool operator==(const Dims&, const Dims&) = default;
};

namespace detail {

inline void require_shape(bool ok, const std::string& what)
{
    if (!ok) throw ShapeError(what);
}

} // namespace detail
} // namespace alrnn

#pragma once

#include <alrnn/types.hpp>

#include <string_view>

namespace alrnn {

/// Cholesky factorization of a symmetric positive definite matrix. On failure
/// retries once with 1e-12 * trace / n added to the diagonal, then throws
/// NumericalError naming `what`.
Eigen::LLT<Mat> spd_factor(const Mat& matrix, std::string_view what);

} // namespace alrnn

#include <alrnn/linalg.hpp>

#include <string>

namespace alrnn {

Eigen::LLT<Mat> spd_factor(const Mat& matrix, std::string_view what)
{
    if (!matrix.allFinite()) {
        throw NumericalError(std::string(what) + ": matrix has non-finite entries");
    }
    Eigen::LLT<Mat> llt(matrix);
    if (llt.info() == Eigen::Success) return llt;

    const double n = static_cast<double>(matrix.rows());
    const double jitter = 1e-12 * matrix.trace() / n;
    Mat shifted = matrix;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() != Eigen::Success) {
        throw NumericalError(std::string(what) + ": Cholesky failed after jitter " +
                             std::to_string(jitter) + " (n=" + std::to_string(matrix.rows()) +
                             ", trace=" + std::to_string(matrix.trace()) + ")");
    }
    return llt;
}

} // namespace alrnn

#pragma once

#include <alrnn/model.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

namespace alrnn {

/// How a "N(0, s)" table entry is read.
enum class ScaleReading { variance, stddev };

struct SyntheticSpec
{
    Dims dims;
    double weight_scale = 0.8;
    double noise_scale = 1e-3;
    ScaleReading reading = ScaleReading::variance;
    double input_low = -1.0;
    double input_high = 1.0;
    std::uint64_t seed = 0;

    double weight_sd() const;
    double noise_sd() const;
    void validate() const;

    /// T = 10, n = 5, m = 3, r = 4; weights N(0, 0.8), noise N(0, 1e-3).
    static SyntheticSpec small_t10(std::uint64_t seed);
    /// T = 500, n = 80, m = 30, r = 100; weights N(0, 0.05), noise N(0, 1e-5).
    /// Uses the stddev reading: under the variance reading the generated
    /// targets overflow to ~1e200.
    static SyntheticSpec large_t500(std::uint64_t seed);
};

struct SyntheticData
{
    SequenceDataset data;
    RnnParams truth;
};

/// Draws a ReLU generator network and input series, then adds output noise.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

enum class HeaderPolicy {
    none,   // every row is data
    skip,   // first row is always a header
    detect, // first row is a header if any cell fails to parse
};

/// One row per time step: n input columns then m target columns. The split
/// is default_split(T).
SequenceDataset ingest_csv(std::istream& in, int n, int m, HeaderPolicy header);
SequenceDataset ingest_csv_file(const std::string& path, int n, int m, HeaderPolicy header);

/// Writes the same layout ingest_csv reads, 17 significant digits.
void write_csv(std::ostream& out, const SequenceDataset& data);

enum class StandardizeOrder {
    train_window, // statistics from t <= t1 only
    full_series,  // statistics from the whole series
};

struct Standardization
{
    Vec x_mean, x_sd, y_mean, y_sd;

    SequenceDataset apply(const SequenceDataset& data) const;
    SequenceDataset invert(const SequenceDataset& data) const;
};

/// Per-feature zero mean, unit variance. Standard deviations below 1e-12
/// are floored, so constant features map to zero.
std::pair<SequenceDataset, Standardization> standardize(const SequenceDataset& data,
                                                        StandardizeOrder order);

/// 64-bit FNV-1a, used for dataset checksums.
std::uint64_t fnv1a(std::string_view bytes);

} // namespace alrnn

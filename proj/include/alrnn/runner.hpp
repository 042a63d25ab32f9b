#pragma once

#include <alrnn/alm.hpp>
#include <alrnn/baselines.hpp>
#include <alrnn/config.hpp>
#include <alrnn/data.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace alrnn {

inline constexpr int kMetricsSchemaVersion = 1;

struct ExperimentData
{
    SequenceDataset data;
    std::optional<RnnParams> truth; // synthetic sources only
    std::string source;             // "synthetic" or "csv"
    std::string scale_reading;      // synthetic only
};

/// Builds the dataset described by the data.* keys. Synthetic sources need
/// data.seed.
ExperimentData build_dataset(const Config& cfg);

RegWeights regularization_from(const Config& cfg, const Dims& dims);
AlmConfig alm_config_from(const Config& cfg);
BcdConfig bcd_config_from(const Config& cfg);
OptimizerSpec optimizer_from(const Config& cfg, OptimizerKind kind, const InitSpec& init);

/// Rejects keys the runner does not understand.
void check_config_keys(const Config& cfg);

/// Writes dataset.csv, manifest.json and (synthetic) truth.ckpt into out_dir.
/// Returns the dataset checksum.
std::uint64_t cmd_generate(const Config& cfg, const std::string& out_dir);

struct TrainOutcome
{
    std::string status; // completed, converged, diverged
    int exit_code = 0;  // 2 on divergence
    double final_train_err = 0.0;
    double final_test_err = 0.0;
};

/// Runs one experiment; writes metrics.jsonl and checkpoint.txt into out_dir.
TrainOutcome cmd_train(const Config& cfg, const std::string& out_dir);

struct ReportRow
{
    std::string label;
    int runs = 0;
    int incomplete = 0;
    double train_mean = 0.0;
    double train_sd = 0.0;
    double test_mean = 0.0;
    double test_sd = 0.0;
};

/// Aggregates final errors per label (population standard deviation) and
/// writes summary.tsv plus feasvio.tsv (one column per ALM run) into out_dir.
std::vector<ReportRow> cmd_report(const std::vector<std::string>& run_dirs,
                                  const std::string& out_dir, std::ostream& table);

} // namespace alrnn

#pragma once

#include <alrnn/init.hpp>
#include <alrnn/model.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace alrnn {

enum class OptimizerKind { gd, gdc, gdnm, sgd, adam };

OptimizerKind parse_optimizer(std::string_view text);
std::string to_string(OptimizerKind kind);

struct OptimizerSpec
{
    OptimizerKind kind = OptimizerKind::gd;
    double learning_rate = 1e-3;
    double clip_norm = 1.0; // GDC
    double momentum = 0.9;  // GDNM
    int batch_size = 2;     // SGD, Adam
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int epochs = 500;
    std::uint64_t seed = 0; // batch shuffling

    void validate() const;
};

struct BpttResult
{
    double objective = 0.0; // mean squared error over the subset plus weight penalties
    RnnParams grad;
};

/// Gradient of (1/|S|) sum_{t in S} ||y_t - A h_t - c||^2 + l1|A|^2 + ... + l5|c|^2
/// through the unrolled recursion. S defaults to every step; the forward pass
/// always runs over the whole series. sigma'(0) uses the left branch.
BpttResult bptt_grad(const RnnParams& params, const Series& data, const RegWeights& lambdas,
                     const Activation& act,
                     const std::optional<std::vector<int>>& time_subset = std::nullopt);

/// GDC rule: g * clip / ||g|| when ||g|| > clip, otherwise g.
Vec clip_gradient(const Vec& g, double clip_norm);

struct EpochRecord
{
    int epoch = 0;
    double objective = 0.0;
    double train_err = 0.0;
    double test_err = 0.0;
    double grad_norm = 0.0;
    double wall_ms = 0.0;
};

struct BaselineResult
{
    RnnParams params;
    std::vector<EpochRecord> records; // record 0 is the initial point
    bool diverged = false;
};

/// Trains on the training window; errors are recomputed over the full horizon.
BaselineResult baseline_train(const SequenceDataset& data, const RegWeights& lambdas,
                              const OptimizerSpec& spec, const RnnParams& params0,
                              const Activation& act, bool timing = false);

/// Datasets with published tuned learning rates.
enum class BenchmarkSet { synthetic_t10, sp500, synthetic_t500 };

struct TunedHyper
{
    double learning_rate = 0.0;
    double clip_norm = 0.0; // only meaningful for GDC
};

/// Tuned learning rate (and GDC clip norm) for one method, dataset and
/// initialization. Throws ConfigError for initializations outside the table
/// (He, N(0,1e-3), N(0,1e-1), Glorot, LeCun).
TunedHyper tuned_hyper(OptimizerKind kind, BenchmarkSet set, const InitSpec& init);

inline constexpr std::array<double, 5> kLearningRateGrid{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
inline constexpr std::array<double, 8> kClipNormGrid{0.5, 1, 1.5, 2, 3, 4, 5, 6};

/// Batch size used with each benchmark set: 2, 50, 100.
int default_batch_size(BenchmarkSet set);

} // namespace alrnn

#pragma once

#include <alrnn/bcd.hpp>

#include <string>
#include <vector>

namespace alrnn {

struct AlmConfig
{
    double gamma0 = 1.0;
    double eps0 = 0.1;
    double eta1 = 0.99;
    double eta2 = 5.0 / 6.0;
    double eta3 = 0.01;
    double eta4 = 5.0 / 6.0;
    int max_outer = 100;
    double gamma_cap = 1e12;

    // opt-in early stop on FeasVio <= feas_tol and KKT residual <= kkt_tol
    bool tolerance_mode = false;
    double feas_tol = 1e-6;
    double kkt_tol = 1e-4;

    /// Throws ConfigError on out-of-range values. Returns warnings for
    /// accepted but unusual settings (eta3 <= 1).
    std::vector<std::string> validate() const;
};

/// Metrics of one outer iterate. Record 0 is the feasible starting point.
struct RunRecord
{
    int outer_iter = 0;
    int inner_iters = 0;
    double al_value = 0.0; // L at the BCD output, with the duals it was solved for
    double feas_vio = 0.0;
    double kkt_res = 0.0;  // with the updated multipliers
    double gamma = 0.0;    // penalty for the next outer iteration
    double eps = 0.0;      // tolerance for the next outer iteration
    double xi_norm = 0.0;
    double zeta_norm = 0.0;
    double train_err = 0.0;
    double test_err = 0.0;
    double wall_ms = 0.0;

    bool inner_converged = true;
    bool restarted = false;    // BCD started from s0 because the warm start exceeded Gamma
    double inner_bound = 0.0;  // iteration_bound() for this call, as a double
    double min_slack = 0.0;    // worst descent slack over all sweeps
};

enum class RunStatus { completed, converged, diverged };
std::string to_string(RunStatus status);

struct AlmResult
{
    LiftedPoint point;
    AlDuals duals;
    std::vector<RunRecord> records;
    std::vector<std::string> warnings;
    RunStatus status = RunStatus::completed;
};

/// s0 = (z0, h, u) from the forward recursion.
LiftedPoint feasible_init(const RnnParams& params0, const Mat& x_series, const Activation& act);

/// xi += gamma C1, zeta += gamma C2, eps *= eta4.
AlDuals update_multipliers(const AlDuals& duals, const LiftedPoint& point, const Mat& x_series,
                           const Activation& act, double eta4);

struct PenaltyUpdate
{
    double gamma = 0.0;
    bool increased = false;
    bool capped = false;
};

/// duals carries the already-updated multipliers and the current gamma.
PenaltyUpdate update_penalty(const AlDuals& duals, const LiftedPoint& now,
                             const LiftedPoint& prev, const Mat& x_series, const Activation& act,
                             const AlmConfig& cfg);

/// max(||u - Psi(h) w||, ||h - sigma(u)||).
double feas_vio(const LiftedPoint& point, const Mat& x_series, const Activation& act);

struct SplitErrors
{
    double train_err = 0.0;
    double test_err = 0.0;
};

/// Forward pass over the full horizon; averages squared errors over each window.
SplitErrors train_test_errors(const RnnParams& params, const SequenceDataset& data,
                              const Activation& act);

/// Trains on the training window of `data` starting from params0.
AlmResult alm_train(const SequenceDataset& data, const RegWeights& lambdas, const AlmConfig& cfg,
                    const BcdConfig& bcd_cfg, const RnnParams& params0, const Activation& act,
                    bool timing = false);

} // namespace alrnn

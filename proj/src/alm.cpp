#include <alrnn/alm.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace alrnn {

std::vector<std::string> AlmConfig::validate() const
{
    auto open_unit = [](double v, const char* name) {
        if (!(v > 0.0 && v < 1.0)) {
            throw ConfigError(std::string("alm: ") + name + " must lie in (0,1), got " +
                              std::to_string(v));
        }
    };
    if (!(gamma0 > 0.0)) throw ConfigError("alm: gamma0 must be > 0");
    if (!(eps0 > 0.0)) throw ConfigError("alm: eps0 must be > 0");
    open_unit(eta1, "eta1");
    open_unit(eta2, "eta2");
    open_unit(eta4, "eta4");
    if (!(eta3 > 0.0)) throw ConfigError("alm: eta3 must be > 0");
    if (max_outer < 0) throw ConfigError("alm: max_outer must be >= 0");
    if (!(gamma_cap >= gamma0)) throw ConfigError("alm: gamma_cap must be >= gamma0");
    if (tolerance_mode && !(feas_tol > 0.0 && kkt_tol > 0.0)) {
        throw ConfigError("alm: tolerance mode needs feas_tol, kkt_tol > 0");
    }
    std::vector<std::string> warnings;
    if (eta3 <= 1.0) {
        warnings.push_back("eta3 = " + std::to_string(eta3) +
                           " <= 1; the convergence argument for the penalty schedule assumes eta3 > 1");
    }
    return warnings;
}

std::string to_string(RunStatus status)
{
    switch (status) {
    case RunStatus::completed:
        return "completed";
    case RunStatus::converged:
        return "converged";
    case RunStatus::diverged:
        return "diverged";
    }
    return "completed";
}

LiftedPoint feasible_init(const RnnParams& params0, const Mat& x_series, const Activation& act)
{
    if (!params0.all_finite()) throw NumericalError("feasible_init: non-finite parameters");
    const ForwardResult fw = forward(params0, x_series, act);
    return {params0, fw.hidden, fw.preact};
}

AlDuals update_multipliers(const AlDuals& duals, const LiftedPoint& point, const Mat& x_series,
                           const Activation& act, double eta4)
{
    const Residuals res = constraint_residuals(point, x_series, act);
    AlDuals out = duals;
    out.xi += duals.gamma * res.c1;
    out.zeta += duals.gamma * res.c2;
    out.eps *= eta4;
    return out;
}

namespace {

double max_residual(const LiftedPoint& point, const Mat& x_series, const Activation& act)
{
    const Residuals res = constraint_residuals(point, x_series, act);
    return std::max(res.c1.norm(), res.c2.norm());
}

} // namespace

PenaltyUpdate update_penalty(const AlDuals& duals, const LiftedPoint& now,
                             const LiftedPoint& prev, const Mat& x_series, const Activation& act,
                             const AlmConfig& cfg)
{
    PenaltyUpdate out;
    out.gamma = duals.gamma;
    if (max_residual(now, x_series, act) <= cfg.eta1 * max_residual(prev, x_series, act)) {
        return out;
    }
    const double e = 1.0 + cfg.eta3;
    const double grown = std::max({duals.gamma / cfg.eta2, std::pow(duals.xi.norm(), e),
                                   std::pow(duals.zeta.norm(), e)});
    out.increased = true;
    if (grown > cfg.gamma_cap) {
        out.capped = true;
        out.gamma = std::max(cfg.gamma_cap, duals.gamma);
    } else {
        out.gamma = grown;
    }
    return out;
}

double feas_vio(const LiftedPoint& point, const Mat& x_series, const Activation& act)
{
    return max_residual(point, x_series, act);
}

SplitErrors train_test_errors(const RnnParams& params, const SequenceDataset& data,
                              const Activation& act)
{
    data.validate();
    const ForwardResult fw = forward(params, data.x, act);
    const Mat sq = (fw.predictions - data.y).colwise().squaredNorm();
    SplitErrors out;
    out.train_err = sq.leftCols(data.t1).sum() / data.t1;
    out.test_err = sq.rightCols(data.test_steps()).sum() / data.test_steps();
    return out;
}

AlmResult alm_train(const SequenceDataset& data, const RegWeights& lambdas, const AlmConfig& cfg,
                    const BcdConfig& bcd_cfg, const RnnParams& params0, const Activation& act,
                    bool timing)
{
    using clock = std::chrono::steady_clock;
    const auto t_begin = clock::now();
    auto elapsed_ms = [&] {
        return timing ? std::chrono::duration<double, std::milli>(clock::now() - t_begin).count()
                      : 0.0;
    };

    AlmResult out;
    out.warnings = cfg.validate();
    bcd_cfg.validate();
    lambdas.validate();
    data.validate();

    const AlProblem prob{data.train(), lambdas, act, params0.hidden_dim()};
    const Mat& x = prob.data.x;
    const LiftedPoint s0 = feasible_init(params0, x, act);
    AlDuals duals = AlDuals::zeros(static_cast<int>(s0.hidden.size()), cfg.gamma0, cfg.eps0);

    const double l0 = al_value(s0, duals, prob);
    if (!std::isfinite(l0)) throw NumericalError("alm: non-finite L at the initial point");
    if (bcd_cfg.big_gamma < l0) {
        throw ConfigError("alm: Gamma = " + std::to_string(bcd_cfg.big_gamma) +
                          " is below L(s0) = " + std::to_string(l0));
    }

    auto make_record = [&](int k, const LiftedPoint& s, const AlDuals& d, double l_val) {
        RunRecord rec;
        rec.outer_iter = k;
        rec.al_value = l_val;
        rec.feas_vio = feas_vio(s, x, act);
        rec.kkt_res = kkt_residual(s, d.xi, d.zeta, prob);
        rec.gamma = d.gamma;
        rec.eps = d.eps;
        rec.xi_norm = d.xi.norm();
        rec.zeta_norm = d.zeta.norm();
        const SplitErrors errs = train_test_errors(s.params, data, act);
        rec.train_err = errs.train_err;
        rec.test_err = errs.test_err;
        rec.wall_ms = elapsed_ms();
        return rec;
    };

    out.records.push_back(make_record(0, s0, duals, l0));
    out.point = s0;
    out.duals = duals;

    LiftedPoint prev = s0;
    bool cap_reported = false;
    for (int k = 1; k <= cfg.max_outer; ++k) {
        bool restarted = false;
        const LiftedPoint* start = &s0;
        if (k > 1) {
            const double warm = al_value(prev, duals, prob);
            if (std::isfinite(warm) && warm <= bcd_cfg.big_gamma) {
                start = &prev;
            } else {
                restarted = true;
            }
        }

        BcdResult inner;
        try {
            inner = bcd_solve(*start, duals, prob, bcd_cfg);
        } catch (const NumericalError& e) {
            out.warnings.push_back("outer " + std::to_string(k) + ": " + e.what());
            out.status = RunStatus::diverged;
            break;
        }
        const double l_val = inner.trace.back().l_after_u;
        if (!std::isfinite(l_val) || !inner.point.params.all_finite()) {
            out.status = RunStatus::diverged;
            break;
        }

        AlDuals next = update_multipliers(duals, inner.point, x, act, cfg.eta4);
        const PenaltyUpdate pen = update_penalty(next, inner.point, prev, x, act, cfg);
        if (pen.capped && !cap_reported) {
            out.warnings.push_back("outer " + std::to_string(k) + ": penalty capped at " +
                                   std::to_string(cfg.gamma_cap));
            cap_reported = true;
        }
        next.gamma = pen.gamma;

        RunRecord rec = make_record(k, inner.point, next, l_val);
        rec.inner_iters = inner.iters;
        rec.inner_converged = inner.converged;
        rec.restarted = restarted;
        const AlphaFloors floors = alpha_floors(lambdas, duals.gamma);
        rec.inner_bound = static_cast<double>(
            iteration_bound(inner.start_value, duals, inner.lip, floors, bcd_cfg.mu, duals.eps));
        rec.min_slack = std::numeric_limits<double>::infinity();
        for (const auto& tr : inner.trace) rec.min_slack = std::min(rec.min_slack, tr.min_slack());
        out.records.push_back(rec);

        prev = inner.point;
        duals = next;
        out.point = inner.point;
        out.duals = duals;

        if (cfg.tolerance_mode && rec.feas_vio <= cfg.feas_tol && rec.kkt_res <= cfg.kkt_tol) {
            out.status = RunStatus::converged;
            break;
        }
    }
    return out;
}

} // namespace alrnn

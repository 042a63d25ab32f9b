#include <alrnn/bcd.hpp>
#include <alrnn/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace alrnn {

void BcdConfig::validate() const
{
    if (!(mu > 0.0)) throw ConfigError("bcd: mu must be > 0");
    if (max_inner < 1) throw ConfigError("bcd: max_inner must be >= 1");
    if (!std::isfinite(big_gamma)) throw ConfigError("bcd: big_gamma must be finite");
}

RnnParams update_z(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob)
{
    const ZGradient zg = grad_z(point, duals, prob);
    const int r = prob.r;
    const int n = static_cast<int>(prob.data.x.rows());
    const int m = static_cast<int>(prob.data.y.rows());
    const Vec w = zg.matrix_w.solve(-zg.rhs_w);
    const Vec a = zg.matrix_a.solve(-zg.rhs_a);
    if (!w.allFinite() || !a.allFinite()) {
        throw NumericalError("update_z: non-finite solution (gamma=" + std::to_string(duals.gamma) +
                             ")");
    }
    RnnParams out = RnnParams::zeros(n, m, r);
    out.set_recurrent_block(w.reshaped(r, r + n + 1));
    out.set_readout_block(a.reshaped(m, r + 1));
    return out;
}

Vec update_h(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob)
{
    const HGradient hg = grad_h(point, duals, prob);
    const int r = prob.r;
    const int t_len = prob.data.steps();
    Mat h(r, t_len);
    if (t_len > 1) {
        const auto d1 = spd_factor(hg.d1_matrix, "update_h D1");
        h.leftCols(t_len - 1) = d1.solve(hg.rhs.leftCols(t_len - 1));
    }
    const auto d2 = spd_factor(hg.d2_matrix, "update_h D2");
    h.col(t_len - 1) = d2.solve(hg.rhs.col(t_len - 1));
    if (!h.allFinite()) throw NumericalError("update_h: non-finite solution");
    return h.reshaped();
}

Vec update_u(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob, double mu)
{
    const PsiOperator psi(point.hidden, prob.data.x, prob.r);
    const Vec drive = psi.apply_block(point.params.recurrent_block());
    const double g = duals.gamma;
    Vec u(point.preact.size());
    OneDimProblem p;
    p.gamma = g;
    p.mu = mu;
    p.lambda6 = prob.lambdas.l6;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        p.theta1 = drive[i] - duals.xi[i] / g;
        p.theta2 = point.hidden[i] + duals.zeta[i] / g;
        p.theta3 = point.preact[i];
        u[i] = solve_1d(p, prob.act).u_star;
    }
    return u;
}

double SweepTrace::min_slack() const
{
    return std::min({l_start - l_after_z, l_after_z - l_after_h, l_after_h - l_after_u});
}

BcdResult bcd_solve(const LiftedPoint& start, const AlDuals& duals, const AlProblem& prob,
                    const BcdConfig& cfg)
{
    cfg.validate();
    BcdResult res;
    res.point = start;
    res.start_value = al_value(start, duals, prob);
    if (!std::isfinite(res.start_value)) throw NumericalError("bcd: non-finite start value");
    res.lip = lipschitz_bounds(duals, prob, res.start_value);
    res.threshold = duals.eps / std::max({res.lip.l1_const, res.lip.l2_const, cfg.mu});

    LiftedPoint& s = res.point;
    double l_prev = res.start_value;
    for (int j = 1; j <= cfg.max_inner; ++j) {
        const Vec before = s.stacked();
        SweepTrace tr;
        tr.l_start = l_prev;

        s.params = update_z(s, duals, prob);
        if (cfg.record_trace) tr.l_after_z = al_value(s, duals, prob);
        s.hidden = update_h(s, duals, prob);
        if (cfg.record_trace) tr.l_after_h = al_value(s, duals, prob);
        s.preact = update_u(s, duals, prob, cfg.mu);
        tr.l_after_u = al_value(s, duals, prob);
        if (!std::isfinite(tr.l_after_u)) throw NumericalError("bcd: non-finite L in sweep " + std::to_string(j));
        if (!cfg.record_trace) tr.l_after_z = tr.l_after_h = tr.l_after_u;

        tr.step_norm = (s.stacked() - before).norm();
        l_prev = tr.l_after_u;
        res.iters = j;
        res.trace.push_back(tr);
        if (tr.step_norm <= res.threshold) {
            res.converged = true;
            break;
        }
    }
    return res;
}

AlphaFloors alpha_floors(const RegWeights& lam, double gamma)
{
    return {2.0 * std::min({lam.l1, lam.l2, lam.l3, lam.l4, lam.l5}), gamma};
}

std::int64_t iteration_bound(double start_val, const AlDuals& duals, const LipschitzBounds& lip,
                             const AlphaFloors& alphas, double mu, double eps, BoundVariant variant)
{
    if (!(eps > 0.0)) throw ConfigError("iteration_bound: eps must be > 0");
    if (!(alphas.alpha1 > 0.0 && alphas.alpha2 > 0.0 && mu > 0.0)) {
        throw ConfigError("iteration_bound: alpha floors and mu must be > 0");
    }
    const double g = duals.gamma;
    const double top = start_val + duals.xi.squaredNorm() / (2 * g) +
                       duals.zeta.squaredNorm() / (2 * g);
    const double lmax = std::max({lip.l1_const, lip.l2_const, mu});
    const double c = variant == BoundVariant::certified_min
                         ? 0.5 * std::min({alphas.alpha1, alphas.alpha2, mu})
                         : 0.5 * std::max({alphas.alpha1, alphas.alpha2, mu});
    const double j = std::ceil(std::max(top, 0.0) * lmax * lmax / (c * eps * eps));
    constexpr auto cap = std::numeric_limits<std::int64_t>::max();
    if (!(j < static_cast<double>(cap))) return cap;
    return static_cast<std::int64_t>(j);
}

} // namespace alrnn

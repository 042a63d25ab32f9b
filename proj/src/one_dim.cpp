#include <alrnn/bcd.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace alrnn {

double OneDimProblem::phi(double u, const Activation& act) const
{
    const double s = act.value(u);
    return 0.5 * gamma * (u - theta1) * (u - theta1) + 0.5 * gamma * (theta2 - s) * (theta2 - s) +
           0.5 * mu * (u - theta3) * (u - theta3) + lambda6 * u * u;
}

void OneDimProblem::validate() const
{
    if (!(gamma > 0.0)) throw ConfigError("1-D problem: gamma must be > 0");
    if (!(mu >= 0.0)) throw ConfigError("1-D problem: mu must be >= 0");
    if (!(lambda6 >= 0.0)) throw ConfigError("1-D problem: lambda6 must be >= 0");
    if (!std::isfinite(theta1) || !std::isfinite(theta2) || !std::isfinite(theta3)) {
        throw NumericalError("1-D problem: non-finite theta");
    }
}

double elu_bracket(const OneDimProblem& p)
{
    const double num = p.gamma * std::abs(p.theta1) + p.gamma * (std::abs(p.theta2) + 1.0) +
                       p.mu * std::abs(p.theta3);
    return -(1.0 + num / (p.gamma + p.mu + 2.0 * p.lambda6)) - 5.0;
}

namespace {

// minimizer of the u >= 0 branch, shared by all three activations
double positive_branch(const OneDimProblem& p)
{
    const double num = p.gamma * p.theta1 + p.gamma * p.theta2 + p.mu * p.theta3;
    return num > 0.0 ? num / (2.0 * p.gamma + 2.0 * p.lambda6 + p.mu) : 0.0;
}

double relu_negative(const OneDimProblem& p)
{
    const double num = p.gamma * p.theta1 + p.mu * p.theta3;
    return num < 0.0 ? num / (p.gamma + 2.0 * p.lambda6 + p.mu) : 0.0;
}

double leaky_negative(const OneDimProblem& p, double slope)
{
    // stationary point of the u <= 0 quadratic; clamp by the sign of its own numerator
    const double num = p.gamma * p.theta1 + p.gamma * slope * p.theta2 + p.mu * p.theta3;
    return num < 0.0 ? num / (p.gamma + p.gamma * slope * slope + 2.0 * p.lambda6 + p.mu) : 0.0;
}

struct EluBranch
{
    const OneDimProblem& p;

    double dphi(double u) const
    {
        const double e = std::exp(u);
        return p.gamma * (u - p.theta1) - p.gamma * (p.theta2 + 1.0 - e) * e +
               p.mu * (u - p.theta3) + 2.0 * p.lambda6 * u;
    }

    // phi'' written in z = e^u
    double curvature(double u) const
    {
        const double z = std::exp(u);
        return 2.0 * p.gamma * z * z - p.gamma * (p.theta2 + 1.0) * z + p.gamma + p.mu +
               2.0 * p.lambda6;
    }

    // phi' is increasing on [lo, hi]
    double convex_min(double lo, double hi) const
    {
        if (dphi(lo) >= 0.0) return lo;
        if (dphi(hi) <= 0.0) return hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double d = dphi(mid);
            if (std::abs(d) <= 1e-12) return mid;
            if (d > 0.0) {
                hi = mid;
            } else {
                lo = mid;
            }
            if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) {
                break;
            }
        }
        return 0.5 * (lo + hi);
    }
};

double elu_negative(const OneDimProblem& p, const Activation& act)
{
    const double lower = elu_bracket(p);
    const EluBranch branch{p};

    // inflection points: roots z in (e^lower, 1) of 2g z^2 - g(t2+1) z + g + mu + 2 l6
    std::array<double, 4> knots{};
    int count = 0;
    knots[count++] = lower;
    const double qa = 2.0 * p.gamma;
    const double qb = -p.gamma * (p.theta2 + 1.0);
    const double qc = p.gamma + p.mu + 2.0 * p.lambda6;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double z_lo = (-qb - sq) / (2.0 * qa);
        const double z_hi = (-qb + sq) / (2.0 * qa);
        const double z_min = std::exp(lower);
        for (const double z : {z_lo, z_hi}) {
            if (z > z_min && z < 1.0) knots[count++] = std::log(z);
        }
    }
    knots[count++] = 0.0;
    std::sort(knots.begin(), knots.begin() + count);

    double best_u = lower;
    double best_val = p.phi(lower, act);
    auto consider = [&](double u) {
        const double v = p.phi(u, act);
        if (v < best_val) {
            best_val = v;
            best_u = u;
        }
    };
    for (int k = 0; k + 1 < count; ++k) {
        const double lo = knots[k];
        const double hi = knots[k + 1];
        consider(hi);
        if (hi <= lo) continue;
        if (branch.curvature(0.5 * (lo + hi)) > 0.0) consider(branch.convex_min(lo, hi));
    }
    return best_u;
}

} // namespace

OneDimSolution solve_1d(const OneDimProblem& problem, const Activation& act)
{
    problem.validate();
    OneDimSolution sol;
    sol.u_plus = positive_branch(problem);
    switch (act.kind()) {
    case ActivationKind::relu:
        sol.u_minus = relu_negative(problem);
        break;
    case ActivationKind::leaky_relu:
        sol.u_minus = leaky_negative(problem, act.slope());
        break;
    case ActivationKind::elu:
        sol.u_minus = elu_negative(problem, act);
        break;
    }
    const double f_plus = problem.phi(sol.u_plus, act);
    const double f_minus = problem.phi(sol.u_minus, act);
    if (f_plus <= f_minus) {
        sol.u_star = sol.u_plus;
        sol.phi_at_star = f_plus;
    } else {
        sol.u_star = sol.u_minus;
        sol.phi_at_star = f_minus;
    }
    return sol;
}

} // namespace alrnn

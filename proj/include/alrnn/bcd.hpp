#pragma once

#include <alrnn/auglag.hpp>

#include <cstdint>
#include <vector>

namespace alrnn {

struct BcdConfig
{
    double mu = 1e-5;     // proximal weight of the u-update
    int max_inner = 500;
    double big_gamma = 100.0; // start-acceptance level for warm starts
    bool record_trace = true;

    void validate() const;
};

/// phi(u) = (g/2)(u - t1)^2 + (g/2)(t2 - sigma(u))^2 + (mu/2)(u - t3)^2 + l6 u^2
struct OneDimProblem
{
    double theta1 = 0.0;
    double theta2 = 0.0;
    double theta3 = 0.0;
    double gamma = 1.0;
    double mu = 0.0;
    double lambda6 = 0.0;

    double phi(double u, const Activation& act) const;
    void validate() const;
};

struct OneDimSolution
{
    double u_star = 0.0;
    double u_plus = 0.0;  // minimizer over u >= 0
    double u_minus = 0.0; // minimizer over u <= 0
    double phi_at_star = 0.0;
};

/// Exact global minimizer of phi. Closed form for ReLU and leaky ReLU; for ELU
/// the negative branch is searched on a provable bracket. Ties go to u_plus.
OneDimSolution solve_1d(const OneDimProblem& problem, const Activation& act);

/// Lower end of the ELU search bracket for the negative branch.
double elu_bracket(const OneDimProblem& problem);

/// Exact minimizer of L over z with (h, u) fixed.
RnnParams update_z(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob);

/// Exact minimizer of L over h with (z, u) fixed. Returns the new h.
Vec update_h(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob);

/// Global minimizer of L(z, h, .) + (mu/2)||. - u_prev||^2 with u_prev = point.preact.
Vec update_u(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob, double mu);

/// L values around one z -> h -> u sweep.
struct SweepTrace
{
    double l_start = 0.0;
    double l_after_z = 0.0;
    double l_after_h = 0.0;
    double l_after_u = 0.0;
    double step_norm = 0.0;

    /// Smallest slack of the three descent inequalities (>= 0 when monotone).
    double min_slack() const;
};

struct BcdResult
{
    LiftedPoint point;
    int iters = 0;
    bool converged = false; // stop rule met before max_inner
    double start_value = 0.0;
    double threshold = 0.0; // eps / max(L1, L2, mu)
    LipschitzBounds lip;
    std::vector<SweepTrace> trace;
};

BcdResult bcd_solve(const LiftedPoint& start, const AlDuals& duals, const AlProblem& prob,
                    const BcdConfig& cfg);

enum class BoundVariant {
    certified_min, // c = min(a1, a2, mu) / 2
    literal_max,   // c = max(a1, a2, mu) / 2
};

struct AlphaFloors
{
    double alpha1 = 0.0; // z-block strong convexity floor, 2 min(l1..l5)
    double alpha2 = 0.0; // h-block floor, gamma
};
AlphaFloors alpha_floors(const RegWeights& lambdas, double gamma);

/// Sweep budget after which the stop rule must hold. Saturates at INT64_MAX.
std::int64_t iteration_bound(double start_val, const AlDuals& duals, const LipschitzBounds& lip,
                             const AlphaFloors& alphas, double mu, double eps,
                             BoundVariant variant = BoundVariant::certified_min);

} // namespace alrnn

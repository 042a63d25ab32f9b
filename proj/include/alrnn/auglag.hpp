#pragma once

#include <alrnn/model.hpp>

namespace alrnn {

/// Multipliers, penalty and tolerance of one outer ALM state.
struct AlDuals
{
    Vec xi;            // multiplier on u - Psi(h) w
    Vec zeta;          // multiplier on h - sigma(u)
    double gamma = 1.0;
    double eps = 0.0;

    static AlDuals zeros(int rt, double gamma, double eps);
    void validate(Eigen::Index rt) const;
};

/// Training data, weights and activation shared by every AL evaluation.
struct AlProblem
{
    Series data;
    RegWeights lambdas;
    Activation act;
    int r = 1;

    Dims dims() const
    {
        return {static_cast<int>(data.x.rows()), static_cast<int>(data.y.rows()), r,
                data.steps()};
    }
};

/// L(s, xi, zeta, gamma).
double al_value(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob);

/// Completed-square form of the same function (independent evaluation path).
double al_value_completed_square(const LiftedPoint& point, const AlDuals& duals,
                                 const AlProblem& prob);

/// L = g + q with g smooth (objective plus the C_1 penalty) and q carrying the
/// sigma(u) penalty.
struct AlSplit
{
    double smooth = 0.0;
    double nonsmooth = 0.0;
};
AlSplit al_split(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob);

/// A symmetric matrix of the form K (x) I_d acting on column-stacked vectors.
/// Both z-block Hessians share this structure.
class KroneckerSystem
{
public:
    KroneckerSystem() = default;
    KroneckerSystem(Mat factor, int identity_dim)
        : factor_(std::move(factor)), identity_dim_(identity_dim)
    {
    }

    const Mat& factor() const { return factor_; }
    int identity_dim() const { return identity_dim_; }
    Eigen::Index size() const { return factor_.rows() * identity_dim_; }

    Vec multiply(const Vec& v) const;
    /// Solves (K (x) I) x = rhs through a Cholesky factorization of K.
    Vec solve(const Vec& rhs) const;
    Mat dense() const;

private:
    Mat factor_;
    int identity_dim_ = 1;
};

struct ZGradient
{
    KroneckerSystem matrix_w; // gamma Psi^T Psi + 2 Lambda_1
    Vec rhs_w;                // -Psi^T (xi + gamma u)
    KroneckerSystem matrix_a; // (2/T) sum Phi^T Phi + 2 Lambda_2
    Vec rhs_a;                // -(2/T) sum Phi^T y_t
    Vec gradient;             // (Q1 w + q1; Q2 a + q2)
};
ZGradient grad_z(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob);

struct HGradient
{
    Mat d1_matrix; // gamma W^T W + (2/T) A^T A + gamma I
    Mat d2_matrix; // (2/T) A^T A + gamma I
    Mat rhs;       // r x T, column t holds d_{1t} (t < T) or d_{2T}
    Vec gradient;
};
HGradient grad_h(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob);

/// Level-set constants for the z- and h-gradient Lipschitz bounds.
struct LipschitzBounds
{
    double level = 0.0; // r-hat
    double delta = 0.0;
    double delta0 = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta3 = 0.0;
    double delta4 = 0.0;
    double delta5 = 0.0;
    double l1_const = 0.0;
    double l2_const = 0.0;
};

/// Throws ConfigError when lambda_6 = 0 (the constants are unbounded) or the
/// level is below the AL lower bound.
LipschitzBounds lipschitz_bounds(const AlDuals& duals, const AlProblem& prob, double level);

/// Minimal-norm element of grad R + J C_1^T xi + d(zeta^T C_2). At a ReLU or
/// leaky kink (u_i = 0) the u-component set is the hull of the two one-sided
/// values.
Vec kkt_element(const LiftedPoint& point, const Vec& xi, const Vec& zeta, const AlProblem& prob);
double kkt_residual(const LiftedPoint& point, const Vec& xi, const Vec& zeta,
                    const AlProblem& prob);

} // namespace alrnn

#pragma once

#include <alrnn/types.hpp>

#include <array>
#include <string>
#include <string_view>

namespace alrnn {

enum class ActivationKind { relu, leaky_relu, elu };

/// Componentwise hidden-state nonlinearity.
class Activation
{
public:
    Activation() = default;

    static Activation relu() { return {ActivationKind::relu, 0.0}; }
    /// max{u, slope*u}; slope must lie strictly inside (0, 1).
    static Activation leaky_relu(double slope);
    static Activation elu() { return {ActivationKind::elu, 0.0}; }

    /// Accepts "relu", "leaky_relu:<slope>" (or "leaky:<slope>") and "elu".
    static Activation parse(std::string_view text);

    ActivationKind kind() const { return kind_; }
    double slope() const { return slope_; }
    /// True when the activation has a kink at 0 (ReLU, leaky ReLU).
    bool has_kink() const { return kind_ != ActivationKind::elu; }

    double value(double u) const;
    Vec apply(const Vec& u) const;

    /// Derivative with the left branch used at u = 0 (0 for ReLU, slope for
    /// leaky ReLU; ELU is C^1 there).
    double derivative(double u) const;
    /// Slope of the branch left of zero, used for subdifferential hulls.
    double left_slope() const;

    std::string name() const;

    friend bool operator==(const Activation&, const Activation&) = default;

private:
    Activation(ActivationKind kind, double slope) : kind_(kind), slope_(slope) {}

    ActivationKind kind_ = ActivationKind::relu;
    double slope_ = 0.0;
};

/// Elman weights. vec() is column-stacking everywhere; the flat block is
/// z = (vec(W); vec(V); b; vec(A); c).
struct RnnParams
{
    Mat w_mat; // r x r
    Mat v_mat; // r x n
    Mat a_mat; // m x r
    Vec b_vec; // r
    Vec c_vec; // m

    static RnnParams zeros(int n, int m, int r);

    int input_dim() const { return static_cast<int>(v_mat.cols()); }
    int output_dim() const { return static_cast<int>(a_mat.rows()); }
    int hidden_dim() const { return static_cast<int>(w_mat.rows()); }

    /// [W V b], an r x (r+n+1) matrix whose vec() is w.
    Mat recurrent_block() const;
    /// [A c], an m x (r+1) matrix whose vec() is a.
    Mat readout_block() const;
    void set_recurrent_block(const Mat& block);
    void set_readout_block(const Mat& block);

    Vec pack_w() const;
    Vec pack_a() const;
    Vec pack() const;
    static RnnParams unpack(const Vec& z, int n, int m, int r);

    void validate() const;
    bool all_finite() const;
};

/// The optimization iterate s = (z; h; u). h_0 = 0 is implicit.
struct LiftedPoint
{
    RnnParams params;
    Vec hidden; // (h_1; ...; h_T)
    Vec preact; // (u_1; ...; u_T)

    int steps() const
    {
        const int r = params.hidden_dim();
        return r == 0 ? 0 : static_cast<int>(hidden.size()) / r;
    }
    Vec stacked() const;
    void validate() const;
};

/// Input/target columns aligned per time step.
struct Series
{
    Mat x; // n x T
    Mat y; // m x T

    int steps() const { return static_cast<int>(x.cols()); }
};

/// A full series with the training window 1..t1 and test window t1+1..T.
struct SequenceDataset
{
    Mat x; // n x T
    Mat y; // m x T
    int t1 = 0;

    int steps() const { return static_cast<int>(x.cols()); }
    int test_steps() const { return steps() - t1; }
    Series train() const { return {x.leftCols(t1), y.leftCols(t1)}; }
    Series full() const { return {x, y}; }
    void validate() const;
};

/// clamp(round(0.9 T), 1, T - 1); needs T >= 2.
int default_split(int t_len);

/// Regularization weights on ||A||, ||W||, ||V||, ||b||, ||c||, ||u||.
struct RegWeights
{
    double l1 = 1.0; // A
    double l2 = 1.0; // W
    double l3 = 1.0; // V
    double l4 = 1.0; // b
    double l5 = 1.0; // c
    double l6 = 1.0; // u

    /// lambda_1 = tau/(rm), lambda_2 = tau/r^2, lambda_3 = tau/(rn),
    /// lambda_4 = tau/r, lambda_5 = tau/m.
    static RegWeights from_tau(double tau, const Dims& dims, double l6);

    /// Rejects nonpositive weights. lambda_6 = 0 is allowed only for
    /// diagnostics (unregularized u).
    void validate(bool allow_zero_l6 = false) const;
};

struct ForwardResult
{
    Vec hidden;
    Vec preact;
    Mat predictions; // m x T
};

/// Runs the Elman recursion from h_0 = 0.
ForwardResult forward(const RnnParams& params, const Mat& x_series, const Activation& act);

/// [h_t^T (x) I_m, I_m].
Mat phi_map(const Vec& h_t, int m);

/// Psi(h) = M (x) I_r where row t of the design M is g_t = (h_{t-1}; x_t; 1).
/// Applies Psi and Psi^T without forming the rT x N_w matrix.
class PsiOperator
{
public:
    PsiOperator(const Vec& hidden, const Mat& x_series, int r);

    int hidden_dim() const { return r_; }
    int steps() const { return static_cast<int>(design_.rows()); }
    /// T x (r+n+1) design matrix M.
    const Mat& design() const { return design_; }

    /// Psi(h) w, with w = vec([W V b]).
    Vec apply(const Vec& w) const;
    /// Same product from the r x (r+n+1) block form of w.
    Vec apply_block(const Mat& block) const;
    /// Psi(h)^T v.
    Vec apply_transpose(const Vec& v) const;
    /// Dense rT x N_w materialization; only for r*T <= 1e4.
    Mat dense() const;

private:
    int r_;
    Mat design_;
};

Mat psi_map(const Vec& hidden, const Mat& x_series, int r);

/// (1/T) sum_t ||y_t - A h_t - c||^2.
double loss(const LiftedPoint& point, const Mat& y_series);

double regularizer(const LiftedPoint& point, const RegWeights& lambdas);

struct Residuals
{
    Vec c1; // u - Psi(h) w
    Vec c2; // h - sigma(u)
};

Residuals constraint_residuals(const LiftedPoint& point, const Mat& x_series, const Activation& act);

/// Unlifted objective evaluated by the nested recursion.
double nested_loss(const RnnParams& params, const Series& data, const Activation& act);

} // namespace alrnn

#include <alrnn/auglag.hpp>
#include <alrnn/linalg.hpp>

#include <algorithm>
#include <cmath>

namespace alrnn {

using detail::require_shape;

AlDuals AlDuals::zeros(int rt, double gamma, double eps)
{
    AlDuals d;
    d.xi = Vec::Zero(rt);
    d.zeta = Vec::Zero(rt);
    d.gamma = gamma;
    d.eps = eps;
    return d;
}

void AlDuals::validate(Eigen::Index rt) const
{
    require_shape(xi.size() == rt, "duals: xi length != rT");
    require_shape(zeta.size() == rt, "duals: zeta length != rT");
    if (!(gamma > 0.0)) throw ConfigError("duals: gamma must be > 0");
    if (!(eps >= 0.0)) throw ConfigError("duals: eps must be >= 0");
}

namespace {

void check_problem(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob)
{
    point.validate();
    require_shape(point.params.hidden_dim() == prob.r, "point: hidden width != problem r");
    require_shape(point.params.input_dim() == prob.data.x.rows(), "point: V cols != input rows");
    require_shape(point.params.output_dim() == prob.data.y.rows(), "point: A rows != output rows");
    require_shape(point.steps() == prob.data.steps(), "point: steps != data steps");
    require_shape(prob.data.y.cols() == prob.data.x.cols(), "data: x and y column counts differ");
    duals.validate(point.hidden.size());
}

double objective(const LiftedPoint& point, const AlProblem& prob)
{
    return loss(point, prob.data.y) + regularizer(point, prob.lambdas);
}

// diag(l_first * 1_k, l_mid * 1_j, ..., l_last) as a vector
Vec recurrent_weights(const RegWeights& lam, int r, int n)
{
    Vec d(r + n + 1);
    d.head(r).setConstant(lam.l2);
    d.segment(r, n).setConstant(lam.l3);
    d[r + n] = lam.l4;
    return d;
}

Vec readout_weights(const RegWeights& lam, int r)
{
    Vec d(r + 1);
    d.head(r).setConstant(lam.l1);
    d[r] = lam.l5;
    return d;
}

// T x (r+1) matrix with rows (h_t; 1)
Mat readout_design(const Vec& hidden, int r, int t_len)
{
    Mat k(t_len, r + 1);
    k.leftCols(r) = hidden.reshaped(r, t_len).transpose();
    k.col(r).setOnes();
    return k;
}

} // namespace

double al_value(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob)
{
    check_problem(point, duals, prob);
    const Residuals res = constraint_residuals(point, prob.data.x, prob.act);
    return objective(point, prob) + duals.xi.dot(res.c1) + duals.zeta.dot(res.c2) +
           0.5 * duals.gamma * (res.c1.squaredNorm() + res.c2.squaredNorm());
}

double al_value_completed_square(const LiftedPoint& point, const AlDuals& duals,
                                 const AlProblem& prob)
{
    check_problem(point, duals, prob);
    const Residuals res = constraint_residuals(point, prob.data.x, prob.act);
    const double g = duals.gamma;
    return objective(point, prob) + 0.5 * g * (res.c1 + duals.xi / g).squaredNorm() +
           0.5 * g * (res.c2 + duals.zeta / g).squaredNorm() - duals.xi.squaredNorm() / (2 * g) -
           duals.zeta.squaredNorm() / (2 * g);
}

AlSplit al_split(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob)
{
    check_problem(point, duals, prob);
    const Residuals res = constraint_residuals(point, prob.data.x, prob.act);
    const double g = duals.gamma;
    AlSplit out;
    out.smooth = objective(point, prob) + 0.5 * g * (res.c1 + duals.xi / g).squaredNorm() -
                 duals.xi.squaredNorm() / (2 * g);
    out.nonsmooth =
        0.5 * g * (res.c2 + duals.zeta / g).squaredNorm() - duals.zeta.squaredNorm() / (2 * g);
    return out;
}

Vec KroneckerSystem::multiply(const Vec& v) const
{
    require_shape(v.size() == size(), "kronecker multiply: length mismatch");
    const Mat prod = v.reshaped(identity_dim_, factor_.rows()) * factor_;
    return prod.reshaped();
}

Vec KroneckerSystem::solve(const Vec& rhs) const
{
    require_shape(rhs.size() == size(), "kronecker solve: length mismatch");
    const auto llt = spd_factor(factor_, "kronecker factor");
    const Mat rhs_t = rhs.reshaped(identity_dim_, factor_.rows()).transpose();
    const Mat sol = llt.solve(rhs_t).transpose();
    return sol.reshaped();
}

Mat KroneckerSystem::dense() const
{
    const auto p = factor_.rows();
    const auto d = identity_dim_;
    Mat out = Mat::Zero(p * d, p * d);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            out.block(i * d, j * d, d, d).diagonal().setConstant(factor_(i, j));
        }
    }
    return out;
}

ZGradient grad_z(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob)
{
    check_problem(point, duals, prob);
    const auto& params = point.params;
    const int r = prob.r;
    const int n = static_cast<int>(prob.data.x.rows());
    const int t_len = prob.data.steps();
    const double gamma = duals.gamma;

    const PsiOperator psi(point.hidden, prob.data.x, r);
    const Mat& design = psi.design();

    Mat k_w = gamma * (design.transpose() * design);
    k_w.diagonal() += 2.0 * recurrent_weights(prob.lambdas, r, n);

    ZGradient out;
    const Vec shifted = duals.xi + gamma * point.preact;
    out.rhs_w = -psi.apply_transpose(shifted);
    out.matrix_w = KroneckerSystem(std::move(k_w), r);

    const Mat k_design = readout_design(point.hidden, r, t_len);
    Mat k_a = (2.0 / t_len) * (k_design.transpose() * k_design);
    k_a.diagonal() += 2.0 * readout_weights(prob.lambdas, r);
    const Mat y_k = prob.data.y * k_design;
    out.rhs_a = -(2.0 / t_len) * y_k.reshaped();
    out.matrix_a = KroneckerSystem(std::move(k_a), static_cast<int>(prob.data.y.rows()));

    const Vec g_w = out.matrix_w.multiply(params.pack_w()) + out.rhs_w;
    const Vec g_a = out.matrix_a.multiply(params.pack_a()) + out.rhs_a;
    out.gradient.resize(g_w.size() + g_a.size());
    out.gradient << g_w, g_a;
    return out;
}

HGradient grad_h(const LiftedPoint& point, const AlDuals& duals, const AlProblem& prob)
{
    check_problem(point, duals, prob);
    const auto& p = point.params;
    const int r = prob.r;
    const int t_len = prob.data.steps();
    const double gamma = duals.gamma;
    const double scale = 2.0 / t_len;

    HGradient out;
    const Mat ata = p.a_mat.transpose() * p.a_mat;
    out.d2_matrix = scale * ata;
    out.d2_matrix.diagonal().array() += gamma;
    out.d1_matrix = out.d2_matrix + gamma * (p.w_mat.transpose() * p.w_mat);

    const Mat u = point.preact.reshaped(r, t_len);
    const Mat sig_u = prob.act.apply(point.preact).reshaped(r, t_len);
    const Mat xi = duals.xi.reshaped(r, t_len);
    const Mat zeta = duals.zeta.reshaped(r, t_len);
    const Mat readout = p.a_mat.transpose() * (prob.data.y.colwise() - p.c_vec);

    out.rhs = gamma * sig_u - zeta + scale * readout;
    if (t_len > 1) {
        // next-step input drive V x_{t+1} + b for t = 1..T-1
        const Mat drive = (p.v_mat * prob.data.x.rightCols(t_len - 1)).colwise() + p.b_vec;
        const Mat next = xi.rightCols(t_len - 1) + gamma * (u.rightCols(t_len - 1) - drive);
        out.rhs.leftCols(t_len - 1) += p.w_mat.transpose() * next;
    }

    const Mat h = point.hidden.reshaped(r, t_len);
    Mat grad(r, t_len);
    if (t_len > 1) grad.leftCols(t_len - 1) = out.d1_matrix * h.leftCols(t_len - 1);
    grad.col(t_len - 1) = out.d2_matrix * h.col(t_len - 1);
    grad -= out.rhs;
    out.gradient = grad.reshaped();
    return out;
}

LipschitzBounds lipschitz_bounds(const AlDuals& duals, const AlProblem& prob, double level)
{
    const auto& lam = prob.lambdas;
    if (!(lam.l6 > 0.0)) {
        throw ConfigError("lipschitz_bounds: lambda6 = 0 leaves delta0 and delta3 unbounded");
    }
    const double gamma = duals.gamma;
    const Dims dims = prob.dims();
    const double r = dims.r;
    const double m = dims.m;
    const double t_len = dims.t_len;

    LipschitzBounds lb;
    lb.level = level;
    lb.delta = level + duals.xi.squaredNorm() / (2 * gamma) + duals.zeta.squaredNorm() / (2 * gamma);
    if (lb.delta < 0.0) {
        throw ConfigError("lipschitz_bounds: level below the AL lower bound");
    }
    const double delta = lb.delta;
    lb.delta0 = std::sqrt(2 * delta / gamma) + std::sqrt(delta / lam.l6) + duals.zeta.norm() / gamma;
    const double x_norm_sq = prob.data.x.squaredNorm();
    // ||h|| <= delta0 on the level set, which bounds ||Psi(h)||
    lb.delta1 = std::sqrt(r * (lb.delta0 * lb.delta0 + x_norm_sq + t_len));
    const double min_w = std::min({lam.l2, lam.l3, lam.l4});
    lb.delta2 = 2 * gamma * lb.delta1 * std::sqrt(r * delta / min_w);
    lb.delta3 = std::sqrt(r) * duals.xi.norm() + gamma * std::sqrt(r * delta / lam.l6);
    const double max_y = prob.data.y.colwise().norm().maxCoeff();
    lb.delta4 = (2 * std::sqrt(m) / std::sqrt(t_len)) *
                (2 * std::sqrt(m * (lb.delta0 * lb.delta0 + 1)) *
                     std::sqrt(delta / std::min(lam.l1, lam.l5)) +
                 max_y);
    lb.delta5 = std::sqrt(delta * (t_len - 1) / lam.l2) + std::sqrt(t_len);
    lb.l1_const = std::sqrt(2.0) * std::max(gamma * lb.delta1, lb.delta2 + lb.delta3 + lb.delta4);
    lb.l2_const = gamma * lb.delta5;
    return lb;
}

Vec kkt_element(const LiftedPoint& point, const Vec& xi, const Vec& zeta, const AlProblem& prob)
{
    const AlDuals probe{xi, zeta, 1.0, 0.0};
    check_problem(point, probe, prob);
    const auto& p = point.params;
    const int r = prob.r;
    const int n = static_cast<int>(prob.data.x.rows());
    const int t_len = prob.data.steps();
    const double scale = 2.0 / t_len;

    const PsiOperator psi(point.hidden, prob.data.x, r);
    const Vec w_reg = recurrent_weights(prob.lambdas, r, n);
    const Mat grad_w_block = 2.0 * p.recurrent_block() * w_reg.asDiagonal();
    const Vec g_w = Vec(grad_w_block.reshaped()) - psi.apply_transpose(xi);

    const Mat k_design = readout_design(point.hidden, r, t_len);
    Mat k_a = scale * (k_design.transpose() * k_design);
    k_a.diagonal() += 2.0 * readout_weights(prob.lambdas, r);
    const Mat g_a_block = p.readout_block() * k_a - scale * (prob.data.y * k_design);
    const Vec g_a = g_a_block.reshaped();

    const Mat h = point.hidden.reshaped(r, t_len);
    const Mat xi_m = xi.reshaped(r, t_len);
    Mat g_h = scale * p.a_mat.transpose() *
                  ((p.a_mat * h).colwise() + p.c_vec - prob.data.y) +
              zeta.reshaped(r, t_len);
    if (t_len > 1) g_h.leftCols(t_len - 1) -= p.w_mat.transpose() * xi_m.rightCols(t_len - 1);

    Vec g_u(point.preact.size());
    for (Eigen::Index i = 0; i < g_u.size(); ++i) {
        const double ui = point.preact[i];
        const double smooth = 2.0 * prob.lambdas.l6 * ui + xi[i];
        if (prob.act.has_kink() && ui == 0.0) {
            const double left = -zeta[i] * prob.act.left_slope();
            const double right = -zeta[i];
            const double lo = std::min(left, right);
            const double hi = std::max(left, right);
            g_u[i] = smooth + std::clamp(-smooth, lo, hi);
        } else {
            g_u[i] = smooth - zeta[i] * prob.act.derivative(ui);
        }
    }

    Vec out(g_w.size() + g_a.size() + g_h.size() + g_u.size());
    out << g_w, g_a, g_h.reshaped(), g_u;
    return out;
}

double kkt_residual(const LiftedPoint& point, const Vec& xi, const Vec& zeta,
                    const AlProblem& prob)
{
    return kkt_element(point, xi, zeta, prob).norm();
}

} // namespace alrnn

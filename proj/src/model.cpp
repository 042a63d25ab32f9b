#include <alrnn/model.hpp>

#include <algorithm>
#include <cmath>

namespace alrnn {

using detail::require_shape;

RnnParams RnnParams::zeros(int n, int m, int r)
{
    RnnParams p;
    p.w_mat = Mat::Zero(r, r);
    p.v_mat = Mat::Zero(r, n);
    p.a_mat = Mat::Zero(m, r);
    p.b_vec = Vec::Zero(r);
    p.c_vec = Vec::Zero(m);
    return p;
}

Mat RnnParams::recurrent_block() const
{
    const int r = hidden_dim();
    const int n = input_dim();
    Mat block(r, r + n + 1);
    block << w_mat, v_mat, b_vec;
    return block;
}

Mat RnnParams::readout_block() const
{
    Mat block(output_dim(), hidden_dim() + 1);
    block << a_mat, c_vec;
    return block;
}

void RnnParams::set_recurrent_block(const Mat& block)
{
    const int r = hidden_dim();
    const int n = input_dim();
    require_shape(block.rows() == r && block.cols() == r + n + 1,
                  "recurrent block must be r x (r+n+1)");
    w_mat = block.leftCols(r);
    v_mat = block.middleCols(r, n);
    b_vec = block.col(r + n);
}

void RnnParams::set_readout_block(const Mat& block)
{
    const int r = hidden_dim();
    require_shape(block.rows() == output_dim() && block.cols() == r + 1,
                  "readout block must be m x (r+1)");
    a_mat = block.leftCols(r);
    c_vec = block.col(r);
}

Vec RnnParams::pack_w() const
{
    return recurrent_block().reshaped();
}

Vec RnnParams::pack_a() const
{
    return readout_block().reshaped();
}

Vec RnnParams::pack() const
{
    const Vec w = pack_w();
    const Vec a = pack_a();
    Vec z(w.size() + a.size());
    z << w, a;
    return z;
}

RnnParams RnnParams::unpack(const Vec& z, int n, int m, int r)
{
    const Dims dims{n, m, r, 1};
    dims.validate();
    require_shape(z.size() == dims.nw() + dims.na(),
                  "z: expected length " + std::to_string(dims.nw() + dims.na()) + ", got " +
                      std::to_string(z.size()));
    RnnParams p = zeros(n, m, r);
    p.set_recurrent_block(z.head(dims.nw()).reshaped(r, r + n + 1));
    p.set_readout_block(z.tail(dims.na()).reshaped(m, r + 1));
    return p;
}

void RnnParams::validate() const
{
    const auto r = w_mat.rows();
    require_shape(w_mat.cols() == r, "W must be square");
    require_shape(v_mat.rows() == r, "V must have r rows");
    require_shape(a_mat.cols() == r, "A must have r columns");
    require_shape(b_vec.size() == r, "b must have length r");
    require_shape(c_vec.size() == a_mat.rows(), "c must have length m");
}

bool RnnParams::all_finite() const
{
    return w_mat.allFinite() && v_mat.allFinite() && a_mat.allFinite() && b_vec.allFinite() &&
           c_vec.allFinite();
}

Vec LiftedPoint::stacked() const
{
    const Vec z = params.pack();
    Vec s(z.size() + hidden.size() + preact.size());
    s << z, hidden, preact;
    return s;
}

void LiftedPoint::validate() const
{
    params.validate();
    const auto r = params.hidden_dim();
    require_shape(hidden.size() == preact.size(), "hidden and preact lengths differ");
    require_shape(r > 0 && hidden.size() % r == 0, "hidden length must be a multiple of r");
}

RegWeights RegWeights::from_tau(double tau, const Dims& dims, double l6)
{
    const double r = dims.r;
    RegWeights w;
    w.l1 = tau / (r * dims.m);
    w.l2 = tau / (r * r);
    w.l3 = tau / (r * dims.n);
    w.l4 = tau / r;
    w.l5 = tau / dims.m;
    w.l6 = l6;
    return w;
}

void RegWeights::validate(bool allow_zero_l6) const
{
    const std::array<double, 5> head{l1, l2, l3, l4, l5};
    for (std::size_t i = 0; i < head.size(); ++i) {
        if (!(head[i] > 0.0)) {
            throw ConfigError("lambda" + std::to_string(i + 1) + " must be > 0");
        }
    }
    if (allow_zero_l6 ? !(l6 >= 0.0) : !(l6 > 0.0)) {
        throw ConfigError(allow_zero_l6 ? "lambda6 must be >= 0" : "lambda6 must be > 0");
    }
}

ForwardResult forward(const RnnParams& params, const Mat& x_series, const Activation& act)
{
    params.validate();
    require_shape(x_series.rows() == params.input_dim(),
                  "x_series: expected " + std::to_string(params.input_dim()) + " rows, got " +
                      std::to_string(x_series.rows()));
    const int r = params.hidden_dim();
    const int t_len = static_cast<int>(x_series.cols());
    ForwardResult out;
    out.hidden.resize(static_cast<Eigen::Index>(r) * t_len);
    out.preact.resize(static_cast<Eigen::Index>(r) * t_len);
    out.predictions.resize(params.output_dim(), t_len);
    Vec h_prev = Vec::Zero(r);
    for (int t = 0; t < t_len; ++t) {
        Vec u = params.v_mat * x_series.col(t) + params.b_vec;
        if (t > 0) u.noalias() += params.w_mat * h_prev;
        h_prev = act.apply(u);
        out.preact.segment(t * r, r) = u;
        out.hidden.segment(t * r, r) = h_prev;
        out.predictions.col(t) = params.a_mat * h_prev + params.c_vec;
    }
    return out;
}

Mat phi_map(const Vec& h_t, int m)
{
    require_shape(m >= 1, "phi_map: m must be >= 1");
    const auto r = h_t.size();
    Mat phi = Mat::Zero(m, m * r + m);
    for (Eigen::Index j = 0; j < r; ++j) {
        phi.middleCols(j * m, m).diagonal().setConstant(h_t[j]);
    }
    phi.rightCols(m).diagonal().setOnes();
    return phi;
}

PsiOperator::PsiOperator(const Vec& hidden, const Mat& x_series, int r) : r_(r)
{
    require_shape(r >= 1, "psi: r must be >= 1");
    const int t_len = static_cast<int>(x_series.cols());
    require_shape(hidden.size() == static_cast<Eigen::Index>(r) * t_len,
                  "psi: hidden length " + std::to_string(hidden.size()) + " != r*T = " +
                      std::to_string(r * t_len));
    const int n = static_cast<int>(x_series.rows());
    design_.resize(t_len, r + n + 1);
    for (int t = 0; t < t_len; ++t) {
        if (t == 0) {
            design_.row(t).head(r).setZero();
        } else {
            design_.row(t).head(r) = hidden.segment((t - 1) * r, r).transpose();
        }
        design_.row(t).segment(r, n) = x_series.col(t).transpose();
        design_(t, r + n) = 1.0;
    }
}

Vec PsiOperator::apply_block(const Mat& block) const
{
    require_shape(block.rows() == r_ && block.cols() == design_.cols(),
                  "psi: block must be r x (r+n+1)");
    const Mat out = block * design_.transpose(); // column t is W h_{t-1} + V x_t + b
    return out.reshaped();
}

Vec PsiOperator::apply(const Vec& w) const
{
    require_shape(w.size() == r_ * design_.cols(), "psi: w has wrong length");
    return apply_block(w.reshaped(r_, design_.cols()));
}

Vec PsiOperator::apply_transpose(const Vec& v) const
{
    require_shape(v.size() == r_ * design_.rows(), "psi^T: v has wrong length");
    const Mat prod = v.reshaped(r_, design_.rows()) * design_;
    return prod.reshaped();
}

Mat PsiOperator::dense() const
{
    const auto t_len = design_.rows();
    const auto p = design_.cols();
    if (r_ * t_len > 10000) {
        throw ShapeError("psi: dense materialization limited to r*T <= 1e4");
    }
    Mat out = Mat::Zero(r_ * t_len, r_ * p);
    for (Eigen::Index t = 0; t < t_len; ++t) {
        for (Eigen::Index j = 0; j < p; ++j) {
            out.block(t * r_, j * r_, r_, r_).diagonal().setConstant(design_(t, j));
        }
    }
    return out;
}

Mat psi_map(const Vec& hidden, const Mat& x_series, int r)
{
    return PsiOperator(hidden, x_series, r).dense();
}

double loss(const LiftedPoint& point, const Mat& y_series)
{
    const int r = point.params.hidden_dim();
    const int t_len = point.steps();
    require_shape(y_series.cols() == t_len && y_series.rows() == point.params.output_dim(),
                  "loss: y_series shape disagrees with point");
    const Mat h = point.hidden.reshaped(r, t_len);
    const Mat resid = (point.params.a_mat * h).colwise() + point.params.c_vec - y_series;
    return resid.squaredNorm() / t_len;
}

double regularizer(const LiftedPoint& point, const RegWeights& lambdas)
{
    const auto& p = point.params;
    return lambdas.l1 * p.a_mat.squaredNorm() + lambdas.l2 * p.w_mat.squaredNorm() +
           lambdas.l3 * p.v_mat.squaredNorm() + lambdas.l4 * p.b_vec.squaredNorm() +
           lambdas.l5 * p.c_vec.squaredNorm() + lambdas.l6 * point.preact.squaredNorm();
}

Residuals constraint_residuals(const LiftedPoint& point, const Mat& x_series, const Activation& act)
{
    const PsiOperator psi(point.hidden, x_series, point.params.hidden_dim());
    Residuals res;
    res.c1 = point.preact - psi.apply_block(point.params.recurrent_block());
    res.c2 = point.hidden - act.apply(point.preact);
    return res;
}

void SequenceDataset::validate() const
{
    require_shape(x.cols() == y.cols(), "dataset: x and y have different column counts");
    require_shape(x.rows() >= 1 && y.rows() >= 1, "dataset: empty feature or target rows");
    require_shape(t1 >= 1 && t1 < steps(),
                  "dataset: split t1=" + std::to_string(t1) + " must satisfy 1 <= t1 < T=" +
                      std::to_string(steps()));
}

int default_split(int t_len)
{
    require_shape(t_len >= 2, "split needs at least two time steps");
    const int t1 = static_cast<int>(std::lround(0.9 * t_len));
    return std::clamp(t1, 1, t_len - 1);
}

double nested_loss(const RnnParams& params, const Series& data, const Activation& act)
{
    // independent of the lifted bookkeeping: plain recursion, one step at a time
    const int t_len = data.steps();
    Vec h = Vec::Zero(params.hidden_dim());
    double total = 0.0;
    for (int t = 0; t < t_len; ++t) {
        h = act.apply(params.w_mat * h + params.v_mat * data.x.col(t) + params.b_vec);
        total += (data.y.col(t) - params.a_mat * h - params.c_vec).squaredNorm();
    }
    return total / t_len;
}

} // namespace alrnn

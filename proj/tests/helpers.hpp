#pragma once

#include <alrnn/auglag.hpp>
#include <alrnn/rng.hpp>

namespace alrnn::testing {

inline Mat random_mat(Rng& rng, Eigen::Index r, Eigen::Index c, double sd = 1.0)
{
    Mat m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.normal(sd);
    return m;
}

inline Vec random_vec(Rng& rng, Eigen::Index n, double sd = 1.0)
{
    return random_mat(rng, n, 1, sd).col(0);
}

inline RnnParams random_params(Rng& rng, int n, int m, int r, double sd = 0.5)
{
    RnnParams p;
    p.w_mat = random_mat(rng, r, r, sd);
    p.v_mat = random_mat(rng, r, n, sd);
    p.a_mat = random_mat(rng, m, r, sd);
    p.b_vec = random_vec(rng, r, sd);
    p.c_vec = random_vec(rng, m, sd);
    return p;
}

// Infeasible point with every |u_i| >= 0.05, away from activation kinks.
inline LiftedPoint random_point(Rng& rng, const Dims& d)
{
    LiftedPoint s;
    s.params = random_params(rng, d.n, d.m, d.r);
    s.hidden = random_vec(rng, d.rt());
    s.preact = random_vec(rng, d.rt());
    for (Eigen::Index i = 0; i < s.preact.size(); ++i) {
        if (std::abs(s.preact[i]) < 0.05) s.preact[i] = s.preact[i] < 0 ? -0.05 : 0.05;
    }
    return s;
}

inline AlProblem random_problem(Rng& rng, const Dims& d, const Activation& act)
{
    AlProblem p;
    p.data = {random_mat(rng, d.n, d.t_len), random_mat(rng, d.m, d.t_len)};
    p.lambdas = {0.3, 0.2, 0.15, 0.25, 0.35, 0.05};
    p.act = act;
    p.r = d.r;
    return p;
}

inline AlDuals random_duals(Rng& rng, const Dims& d, double gamma, double eps = 0.1)
{
    AlDuals du;
    du.xi = random_vec(rng, d.rt());
    du.zeta = random_vec(rng, d.rt());
    du.gamma = gamma;
    du.eps = eps;
    return du;
}

inline LiftedPoint from_stacked(const LiftedPoint& like, const Vec& s)
{
    const int n = like.params.input_dim(), m = like.params.output_dim(), r = like.params.hidden_dim();
    const Dims d{n, m, r, like.steps()};
    LiftedPoint out;
    out.params = RnnParams::unpack(s.head(d.nw() + d.na()), n, m, r);
    out.hidden = s.segment(d.nw() + d.na(), d.rt());
    out.preact = s.tail(d.rt());
    return out;
}

} // namespace alrnn::testing

#include <alrnn/bcd.hpp>
#include <alrnn/verify.hpp>

#include "helpers.hpp"

#include <gtest/gtest.h>

using namespace alrnn;
using namespace alrnn::testing;

namespace {

const Dims kDims{2, 2, 3, 4};

// Dense Hessian of a quadratic from its gradient map.
Mat hessian_of(const std::function<Vec(const Vec&)>& grad, Eigen::Index dim)
{
    const Vec g0 = grad(Vec::Zero(dim));
    Mat h(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) h.col(i) = grad(Vec::Unit(dim, i)) - g0;
    return h;
}

} // namespace

TEST(UpdateZ, StationaryAndMatchesDenseMinimizer)
{
    Rng rng(21, "uz");
    for (int trial = 0; trial < 5; ++trial) {
        const AlProblem prob = random_problem(rng, kDims, Activation::relu());
        const LiftedPoint s = random_point(rng, kDims);
        const AlDuals du = random_duals(rng, kDims, 1.5);
        LiftedPoint t = s;
        t.params = update_z(s, du, prob);

        const Vec fd = fd_gradient(
            [&](const Vec& z) {
                LiftedPoint q = s;
                q.params = RnnParams::unpack(z, kDims.n, kDims.m, kDims.r);
                return al_value(q, du, prob);
            },
            t.params.pack());
        EXPECT_LE(fd.norm(), 1e-6);

        auto grad = [&](const Vec& z) {
            LiftedPoint q = s;
            q.params = RnnParams::unpack(z, kDims.n, kDims.m, kDims.r);
            return grad_z(q, du, prob).gradient;
        };
        const Eigen::Index dim = t.params.pack().size();
        const Mat h = hessian_of(grad, dim);
        const Vec z_star = h.ldlt().solve(-grad(Vec::Zero(dim)));
        EXPECT_LE((z_star - t.params.pack()).norm(), 1e-8 * (1 + z_star.norm()));
        EXPECT_LE(al_value(t, du, prob), al_value(s, du, prob));
    }
}

TEST(UpdateZ, GradientDescentOracle)
{
    Rng rng(22, "uzgd");
    const Dims d{1, 1, 2, 3};
    const AlProblem prob = random_problem(rng, d, Activation::relu());
    const LiftedPoint s = random_point(rng, d);
    const AlDuals du = random_duals(rng, d, 1.0);
    LiftedPoint q = s;
    const ZGradient zg = grad_z(s, du, prob);
    const double lmax = std::max(zg.matrix_w.dense().norm(), zg.matrix_a.dense().norm());
    Vec z = s.params.pack();
    for (int it = 0; it < 200000; ++it) {
        q.params = RnnParams::unpack(z, d.n, d.m, d.r);
        const Vec g = grad_z(q, du, prob).gradient;
        if (g.norm() < 1e-12) break;
        z -= g / lmax;
    }
    EXPECT_LE((z - update_z(s, du, prob).pack()).norm(), 1e-8);
}

TEST(UpdateZ, RidgeOnConstants)
{
    Rng rng(23, "ridge");
    AlProblem prob = random_problem(rng, kDims, Activation::relu());
    LiftedPoint s = random_point(rng, kDims);
    s.hidden.setZero();
    s.preact.setZero();
    const AlDuals du = AlDuals::zeros(kDims.rt(), 2.0, 0.1);
    const RnnParams p = update_z(s, du, prob);
    EXPECT_LE(p.pack_w().norm(), 1e-14);
    EXPECT_LE(p.a_mat.norm(), 1e-14);
    const Vec ybar = prob.data.y.rowwise().mean();
    EXPECT_LE((p.c_vec - ybar / (1 + prob.lambdas.l5)).norm(), 1e-12);
}

TEST(UpdateH, PenaltyOnlyGivesActivation)
{
    Rng rng(24, "uh0");
    const AlProblem prob = random_problem(rng, kDims, Activation::elu());
    LiftedPoint s = random_point(rng, kDims);
    s.params.w_mat.setZero();
    s.params.a_mat.setZero();
    AlDuals du = random_duals(rng, kDims, 3.0);
    du.zeta.setZero();
    EXPECT_LE((update_h(s, du, prob) - prob.act.apply(s.preact)).norm(), 1e-12);
}

TEST(UpdateH, MatchesDenseJointSolve)
{
    Rng rng(25, "uhd");
    const Dims d{2, 1, 2, 3};
    for (int trial = 0; trial < 5; ++trial) {
        const AlProblem prob = random_problem(rng, d, Activation::leaky_relu(0.2));
        const LiftedPoint s = random_point(rng, d);
        const AlDuals du = random_duals(rng, d, 0.8);
        auto grad = [&](const Vec& h) {
            LiftedPoint q = s;
            q.hidden = h;
            return grad_h(q, du, prob).gradient;
        };
        const Mat hess = hessian_of(grad, d.rt());
        const Vec h_star = hess.ldlt().solve(-grad(Vec::Zero(d.rt())));
        const Vec h_new = update_h(s, du, prob);
        EXPECT_LE((h_new - h_star).norm(), 1e-8 * (1 + h_star.norm()));
        LiftedPoint t = s;
        t.hidden = h_new;
        EXPECT_LE(al_value(t, du, prob), al_value(s, du, prob));
    }
}

TEST(UpdateU, LargeProximalWeightKeepsPrevious)
{
    Rng rng(26, "uu");
    const AlProblem prob = random_problem(rng, kDims, Activation::relu());
    const LiftedPoint s = random_point(rng, kDims);
    const AlDuals du = random_duals(rng, kDims, 1.0);
    EXPECT_LE((update_u(s, du, prob, 1e9) - s.preact).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(UpdateU, CoordinatesMatchGridOracle)
{
    Rng rng(27, "uug");
    const Dims d{1, 1, 1, 2};
    for (const Activation act : {Activation::relu(), Activation::leaky_relu(0.5), Activation::elu()}) {
        const AlProblem prob = random_problem(rng, d, act);
        const LiftedPoint s = random_point(rng, d);
        const AlDuals du = random_duals(rng, d, 1.2);
        const double mu = 0.3;
        const Vec u = update_u(s, du, prob, mu);
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            auto f = [&](double v) {
                LiftedPoint q = s;
                q.preact[i] = v;
                q.preact[1 - i] = u[1 - i];
                return al_value(q, du, prob) + 0.5 * mu * (v - s.preact[i]) * (v - s.preact[i]);
            };
            const GridMinimum g = grid_minimize_1d(f, -20, 20, 1e-3, 1e-10);
            EXPECT_LE(f(u[i]), g.value + 1e-9) << act.name();
            EXPECT_NEAR(u[i], g.u, 1e-5) << act.name();
        }
        LiftedPoint t = s;
        t.preact = u;
        EXPECT_LE(al_value(t, du, prob) + 0.5 * mu * (u - s.preact).squaredNorm(),
                  al_value(s, du, prob) + 1e-12);
    }
}

TEST(BcdSolve, MonotoneDescentChain)
{
    Rng rng(28, "chain");
    for (int trial = 0; trial < 10; ++trial) {
        const Dims d{2, 1, 1 + trial % 4, 3 + trial % 8};
        const Activation act = trial % 3 == 0   ? Activation::relu()
                               : trial % 3 == 1 ? Activation::leaky_relu(0.1)
                                                : Activation::elu();
        const AlProblem prob = random_problem(rng, d, act);
        const AlDuals du = random_duals(rng, d, 0.5 + trial);
        BcdConfig cfg;
        cfg.max_inner = 50;
        const BcdResult res = bcd_solve(random_point(rng, d), du, prob, cfg);
        ASSERT_EQ(res.trace.size(), static_cast<std::size_t>(res.iters));
        for (const SweepTrace& tr : res.trace) {
            EXPECT_GE(tr.min_slack(), -1e-10 * std::max(1.0, std::abs(tr.l_start)));
        }
    }
}

TEST(BcdSolve, LargeToleranceStopsAfterOneSweep)
{
    Rng rng(29, "eps");
    const AlProblem prob = random_problem(rng, kDims, Activation::relu());
    const AlDuals du = random_duals(rng, kDims, 1.0, 1e30);
    const BcdResult res = bcd_solve(random_point(rng, kDims), du, prob, BcdConfig{});
    EXPECT_EQ(res.iters, 1);
    EXPECT_TRUE(res.converged);
}

TEST(BcdSolve, ConvergedWithinIterationBound)
{
    Rng rng(30, "jhat");
    const Dims d{1, 1, 2, 3};
    const AlProblem prob = random_problem(rng, d, Activation::relu());
    const AlDuals du = random_duals(rng, d, 1.0, 1e-2);
    BcdConfig cfg;
    cfg.max_inner = 100000;
    cfg.record_trace = false;
    const BcdResult res = bcd_solve(random_point(rng, d), du, prob, cfg);
    ASSERT_TRUE(res.converged);
    const std::int64_t bound = iteration_bound(res.start_value, du, res.lip,
                                               alpha_floors(prob.lambdas, du.gamma), cfg.mu, du.eps);
    EXPECT_LE(res.iters, bound);
}

TEST(IterationBound, ScalesAsInverseSquare)
{
    LipschitzBounds lip;
    lip.l1_const = 3.0;
    lip.l2_const = 2.0;
    const AlDuals du = AlDuals::zeros(2, 1.0, 0.1);
    const AlphaFloors al{0.5, 1.0};
    const auto j1 = iteration_bound(10.0, du, lip, al, 0.1, 1e-1);
    const auto j2 = iteration_bound(10.0, du, lip, al, 0.1, 5e-2);
    EXPECT_NEAR(static_cast<double>(j2) / j1, 4.0, 1e-3);
    // c = min(0.5, 1, 0.1)/2 = 0.05: ceil(10 * 9 / (0.05 * 0.01)) = 180000
    EXPECT_EQ(j1, 180000);
    const auto jmax = iteration_bound(10.0, du, lip, al, 0.1, 1e-1, BoundVariant::literal_max);
    EXPECT_EQ(jmax, 18000);
    EXPECT_EQ(iteration_bound(1e300, du, lip, al, 0.1, 1e-200), std::numeric_limits<std::int64_t>::max());
    EXPECT_THROW(iteration_bound(1.0, du, lip, al, 0.1, 0.0), ConfigError);
}

#include <alrnn/alm.hpp>
#include <alrnn/data.hpp>
#include <alrnn/init.hpp>

#include "helpers.hpp"

#include <gtest/gtest.h>

using namespace alrnn;
using namespace alrnn::testing;

namespace {

const Dims kDims{2, 1, 3, 6};

LiftedPoint feasible_random(Rng& rng, const Mat& x)
{
    return feasible_init(random_params(rng, kDims.n, kDims.m, kDims.r), x, Activation::relu());
}

LiftedPoint shifted(LiftedPoint s, double delta)
{
    s.hidden[0] += delta;
    return s;
}

} // namespace

TEST(FeasibleInit, ZeroParamsAndRandomParams)
{
    Rng rng(40, "init");
    const Mat x = random_mat(rng, kDims.n, kDims.t_len);
    const LiftedPoint z = feasible_init(RnnParams::zeros(kDims.n, kDims.m, kDims.r), x,
                                        Activation::relu());
    EXPECT_EQ(z.hidden.norm(), 0.0);
    EXPECT_EQ(z.preact.norm(), 0.0);
    for (int i = 0; i < 10; ++i) {
        EXPECT_LE(feas_vio(feasible_random(rng, x), x, Activation::relu()), 1e-12);
    }
}

TEST(FeasVio, SingleCoordinatePerturbation)
{
    Rng rng(41, "fv");
    const Mat x = random_mat(rng, kDims.n, kDims.t_len);
    const LiftedPoint s = feasible_random(rng, x);
    const LiftedPoint t = shifted(s, 0.03);
    // h_1 enters C2 at one coordinate and C1 through W h_1 at step 2
    const Residuals res = constraint_residuals(t, x, Activation::relu());
    EXPECT_NEAR(res.c2.norm(), 0.03, 1e-15);
    EXPECT_DOUBLE_EQ(feas_vio(t, x, Activation::relu()), std::max(res.c1.norm(), res.c2.norm()));
    LiftedPoint last = s;
    last.hidden[last.hidden.size() - 1] += 0.03;
    EXPECT_NEAR(feas_vio(last, x, Activation::relu()), 0.03, 1e-15);
}

TEST(Multipliers, UpdateRules)
{
    Rng rng(42, "mult");
    const Mat x = random_mat(rng, kDims.n, kDims.t_len);
    const LiftedPoint s = feasible_random(rng, x);
    const AlDuals du = random_duals(rng, kDims, 1.7, 0.1);
    const AlDuals same = update_multipliers(du, s, x, Activation::relu(), 5.0 / 6.0);
    EXPECT_LE((same.xi - du.xi).norm(), 1e-12);
    EXPECT_LE((same.zeta - du.zeta).norm(), 1e-12);

    const LiftedPoint t = shifted(s, 0.5);
    const AlDuals next = update_multipliers(du, t, x, Activation::relu(), 5.0 / 6.0);
    const Residuals res = constraint_residuals(t, x, Activation::relu());
    EXPECT_LE((next.xi / du.gamma - du.xi / du.gamma - res.c1).norm(), 1e-12);
    EXPECT_LE((next.zeta / du.gamma - du.zeta / du.gamma - res.c2).norm(), 1e-12);

    AlDuals zero = AlDuals::zeros(kDims.rt(), 1.0, 0.1);
    zero = update_multipliers(zero, t, x, Activation::relu(), 5.0 / 6.0);
    EXPECT_LE((zero.xi - res.c1).norm(), 1e-15);
    zero = update_multipliers(zero, s, x, Activation::relu(), 5.0 / 6.0);
    EXPECT_NEAR(zero.eps, 0.1 * (5.0 / 6.0) * (5.0 / 6.0), 1e-15);
    EXPECT_NEAR(zero.eps, 0.06944, 1e-5);
}

TEST(Penalty, UpdateRules)
{
    Rng rng(43, "pen");
    const Mat x = random_mat(rng, kDims.n, kDims.t_len);
    const LiftedPoint s = feasible_random(rng, x);
    const AlmConfig cfg;
    AlDuals du = AlDuals::zeros(kDims.rt(), 1.0, 0.1);
    du.xi[0] = 2.0;

    // residuals shrink by half: no change
    PenaltyUpdate pu = update_penalty(du, shifted(s, 0.5), shifted(s, 1.0), x, Activation::relu(), cfg);
    EXPECT_FALSE(pu.increased);
    EXPECT_EQ(pu.gamma, 1.0);

    pu = update_penalty(du, shifted(s, 1.0), shifted(s, 1.0), x, Activation::relu(), cfg);
    EXPECT_TRUE(pu.increased);
    EXPECT_NEAR(pu.gamma, std::pow(2.0, 1.01), 1e-15);
    EXPECT_NEAR(pu.gamma, 2.0139, 1e-4);

    du.xi.setZero();
    pu = update_penalty(du, shifted(s, 1.0), shifted(s, 1.0), x, Activation::relu(), cfg);
    EXPECT_NEAR(pu.gamma, 1.2, 1e-15);

    AlmConfig capped = cfg;
    capped.gamma_cap = 1.1;
    pu = update_penalty(du, shifted(s, 1.0), shifted(s, 1.0), x, Activation::relu(), capped);
    EXPECT_TRUE(pu.capped);
    EXPECT_EQ(pu.gamma, 1.1);
}

TEST(AlmConfig, ValidationAndWarnings)
{
    AlmConfig cfg;
    EXPECT_EQ(cfg.validate().size(), 1u); // eta3 = 0.01 <= 1
    cfg.eta3 = 2.0;
    EXPECT_TRUE(cfg.validate().empty());
    cfg.eta1 = 1.5;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = AlmConfig{};
    cfg.gamma_cap = 0.5;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Errors, ZeroAndTruthWeights)
{
    SyntheticSpec spec = SyntheticSpec::small_t10(3);
    spec.noise_scale = 0.0;
    const SyntheticData sd = generate_synthetic(spec);
    const SplitErrors truth = train_test_errors(sd.truth, sd.data, Activation::relu());
    EXPECT_LE(truth.train_err, 1e-10);
    EXPECT_LE(truth.test_err, 1e-10);

    const Dims d = spec.dims;
    const SplitErrors zero = train_test_errors(RnnParams::zeros(d.n, d.m, d.r), sd.data,
                                               Activation::relu());
    const double expect = sd.data.y.leftCols(sd.data.t1).squaredNorm() / sd.data.t1;
    EXPECT_NEAR(zero.train_err, expect, 1e-12 * expect);

    // lifted errors match re-run errors on a feasible point
    const LiftedPoint s = feasible_init(sd.truth, sd.data.x, Activation::relu());
    const Mat h = s.hidden.reshaped(d.r, d.t_len);
    const Mat pred = (sd.truth.a_mat * h).colwise() + sd.truth.c_vec;
    EXPECT_NEAR((pred - sd.data.y).leftCols(sd.data.t1).colwise().squaredNorm().sum() / sd.data.t1,
                truth.train_err, 1e-14);
}

TEST(AlmTrain, ScheduleAndInvariants)
{
    const SyntheticData sd = generate_synthetic(SyntheticSpec::small_t10(1));
    const Dims d = SyntheticSpec::small_t10(1).dims;
    const RegWeights lam = RegWeights::from_tau(0.1, d, 1e-8);
    AlmConfig cfg;
    cfg.max_outer = 8;
    BcdConfig bcd;
    bcd.max_inner = 50;
    const RnnParams p0 = init_params(d, InitSpec::parse("normal:0.1"), 7);
    const AlmResult res = alm_train(sd.data, lam, cfg, bcd, p0, Activation::relu());
    ASSERT_EQ(res.records.size(), 9u);
    EXPECT_EQ(res.status, RunStatus::completed);
    EXPECT_LE(res.records[0].feas_vio, 1e-10);
    for (std::size_t k = 1; k < res.records.size(); ++k) {
        EXPECT_GE(res.records[k].gamma, res.records[k - 1].gamma);
        EXPECT_NEAR(res.records[k].eps, cfg.eps0 * std::pow(cfg.eta4, static_cast<double>(k)),
                    1e-15);
        EXPECT_GE(res.records[k].min_slack, -1e-10 * std::max(1.0, std::abs(res.records[k].al_value)));
    }
    EXPECT_FALSE(res.warnings.empty());
}

TEST(AlmTrain, RejectsLevelBelowStart)
{
    const SyntheticData sd = generate_synthetic(SyntheticSpec::small_t10(2));
    const Dims d = SyntheticSpec::small_t10(2).dims;
    BcdConfig bcd;
    bcd.big_gamma = -1.0;
    EXPECT_THROW(alm_train(sd.data, RegWeights::from_tau(0.1, d, 1e-8), AlmConfig{}, bcd,
                           init_params(d, InitSpec{}, 1), Activation::relu()),
                 ConfigError);
}

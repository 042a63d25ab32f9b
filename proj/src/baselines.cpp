#include <alrnn/alm.hpp>
#include <alrnn/baselines.hpp>
#include <alrnn/rng.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace alrnn {

OptimizerKind parse_optimizer(std::string_view text)
{
    if (text == "gd") return OptimizerKind::gd;
    if (text == "gdc") return OptimizerKind::gdc;
    if (text == "gdnm") return OptimizerKind::gdnm;
    if (text == "sgd") return OptimizerKind::sgd;
    if (text == "adam") return OptimizerKind::adam;
    throw ConfigError("unknown optimizer '" + std::string(text) +
                      "' (expected gd, gdc, gdnm, sgd, adam)");
}

std::string to_string(OptimizerKind kind)
{
    switch (kind) {
    case OptimizerKind::gd:
        return "gd";
    case OptimizerKind::gdc:
        return "gdc";
    case OptimizerKind::gdnm:
        return "gdnm";
    case OptimizerKind::sgd:
        return "sgd";
    case OptimizerKind::adam:
        return "adam";
    }
    return "gd";
}

void OptimizerSpec::validate() const
{
    if (!(learning_rate > 0.0)) throw ConfigError("optimizer: learning_rate must be > 0");
    if (kind == OptimizerKind::gdc && !(clip_norm > 0.0)) {
        throw ConfigError("optimizer: clip_norm must be > 0 for gdc");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("optimizer: momentum must lie in [0,1)");
    if (batch_size < 1) throw ConfigError("optimizer: batch_size must be >= 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
        throw ConfigError("optimizer: adam betas must lie in [0,1)");
    }
    if (!(adam_eps > 0.0)) throw ConfigError("optimizer: adam eps must be > 0");
    if (epochs < 0) throw ConfigError("optimizer: epochs must be >= 0");
}

BpttResult bptt_grad(const RnnParams& params, const Series& data, const RegWeights& lambdas,
                     const Activation& act, const std::optional<std::vector<int>>& time_subset)
{
    params.validate();
    detail::require_shape(data.y.cols() == data.x.cols(), "bptt: x and y column counts differ");
    detail::require_shape(data.y.rows() == params.output_dim(), "bptt: y rows != output width");
    const int r = params.hidden_dim();
    const int t_len = data.steps();

    std::vector<char> active(t_len, time_subset ? 0 : 1);
    if (time_subset) {
        for (const int t : *time_subset) {
            detail::require_shape(t >= 0 && t < t_len, "bptt: time index out of range");
            active[t] = 1;
        }
    }
    const int count = static_cast<int>(std::count(active.begin(), active.end(), 1));
    detail::require_shape(count > 0, "bptt: empty time subset");

    const ForwardResult fw = forward(params, data.x, act);
    const Mat h = fw.hidden.reshaped(r, t_len);
    const Mat u = fw.preact.reshaped(r, t_len);

    BpttResult out;
    RnnParams& g = out.grad;
    g = RnnParams::zeros(params.input_dim(), params.output_dim(), r);
    double sse = 0.0;
    Vec carry = Vec::Zero(r); // dLoss/dh_t from later steps
    for (int t = t_len - 1; t >= 0; --t) {
        Vec dh = carry;
        if (active[t]) {
            const Vec resid = fw.predictions.col(t) - data.y.col(t);
            sse += resid.squaredNorm();
            const Vec dy = (2.0 / count) * resid;
            g.a_mat.noalias() += dy * h.col(t).transpose();
            g.c_vec += dy;
            dh.noalias() += params.a_mat.transpose() * dy;
        }
        Vec du(r);
        for (int i = 0; i < r; ++i) du[i] = dh[i] * act.derivative(u(i, t));
        if (t > 0) g.w_mat.noalias() += du * h.col(t - 1).transpose();
        g.v_mat.noalias() += du * data.x.col(t).transpose();
        g.b_vec += du;
        carry.noalias() = params.w_mat.transpose() * du;
    }

    g.a_mat += 2.0 * lambdas.l1 * params.a_mat;
    g.w_mat += 2.0 * lambdas.l2 * params.w_mat;
    g.v_mat += 2.0 * lambdas.l3 * params.v_mat;
    g.b_vec += 2.0 * lambdas.l4 * params.b_vec;
    g.c_vec += 2.0 * lambdas.l5 * params.c_vec;
    out.objective = sse / count + lambdas.l1 * params.a_mat.squaredNorm() +
                    lambdas.l2 * params.w_mat.squaredNorm() +
                    lambdas.l3 * params.v_mat.squaredNorm() +
                    lambdas.l4 * params.b_vec.squaredNorm() +
                    lambdas.l5 * params.c_vec.squaredNorm();
    return out;
}

Vec clip_gradient(const Vec& g, double clip_norm)
{
    const double norm = g.norm();
    if (norm > clip_norm) return g * (clip_norm / norm);
    return g;
}

BaselineResult baseline_train(const SequenceDataset& data, const RegWeights& lambdas,
                              const OptimizerSpec& spec, const RnnParams& params0,
                              const Activation& act, bool timing)
{
    using clock = std::chrono::steady_clock;
    const auto t_begin = clock::now();
    spec.validate();
    data.validate();
    const Series train = data.train();
    const int n = params0.input_dim();
    const int m = params0.output_dim();
    const int r = params0.hidden_dim();

    BaselineResult out;
    Vec theta = params0.pack();
    Vec vel = Vec::Zero(theta.size());
    Vec m1 = Vec::Zero(theta.size());
    Vec m2 = Vec::Zero(theta.size());
    long adam_step = 0;
    Rng rng(spec.seed, "baseline.batches");
    std::vector<int> order(train.steps());
    std::iota(order.begin(), order.end(), 0);

    auto grad_at = [&](const Vec& z, const std::optional<std::vector<int>>& subset) {
        return bptt_grad(RnnParams::unpack(z, n, m, r), train, lambdas, act, subset);
    };
    auto record = [&](int epoch, const Vec& z) {
        EpochRecord rec;
        rec.epoch = epoch;
        const RnnParams p = RnnParams::unpack(z, n, m, r);
        const BpttResult full = bptt_grad(p, train, lambdas, act);
        rec.objective = full.objective;
        rec.grad_norm = full.grad.pack().norm();
        const SplitErrors errs = train_test_errors(p, data, act);
        rec.train_err = errs.train_err;
        rec.test_err = errs.test_err;
        if (timing) {
            rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t_begin).count();
        }
        return rec;
    };

    out.records.push_back(record(0, theta));
    for (int epoch = 1; epoch <= spec.epochs; ++epoch) {
        switch (spec.kind) {
        case OptimizerKind::gd:
            theta -= spec.learning_rate * grad_at(theta, std::nullopt).grad.pack();
            break;
        case OptimizerKind::gdc:
            theta -= spec.learning_rate *
                     clip_gradient(grad_at(theta, std::nullopt).grad.pack(), spec.clip_norm);
            break;
        case OptimizerKind::gdnm: {
            const Vec ahead = theta + spec.momentum * vel;
            vel = spec.momentum * vel - spec.learning_rate * grad_at(ahead, std::nullopt).grad.pack();
            theta += vel;
            break;
        }
        case OptimizerKind::sgd:
        case OptimizerKind::adam: {
            std::shuffle(order.begin(), order.end(), rng.engine());
            for (std::size_t start = 0; start < order.size(); start += spec.batch_size) {
                const auto stop = std::min(order.size(), start + spec.batch_size);
                const std::vector<int> batch(order.begin() + start, order.begin() + stop);
                const Vec g = grad_at(theta, batch).grad.pack();
                if (spec.kind == OptimizerKind::sgd) {
                    theta -= spec.learning_rate * g;
                    continue;
                }
                ++adam_step;
                m1 = spec.beta1 * m1 + (1.0 - spec.beta1) * g;
                m2 = spec.beta2 * m2 + (1.0 - spec.beta2) * g.cwiseAbs2();
                const double c1 = 1.0 - std::pow(spec.beta1, static_cast<double>(adam_step));
                const double c2 = 1.0 - std::pow(spec.beta2, static_cast<double>(adam_step));
                theta.array() -= spec.learning_rate * (m1.array() / c1) /
                                 ((m2.array() / c2).sqrt() + spec.adam_eps);
            }
            break;
        }
        }
        if (!theta.allFinite()) {
            out.diverged = true;
            break;
        }
        const EpochRecord rec = record(epoch, theta);
        if (!std::isfinite(rec.objective) || !std::isfinite(rec.train_err) ||
            !std::isfinite(rec.test_err)) {
            out.diverged = true;
            break;
        }
        out.records.push_back(rec);
        out.params = RnnParams::unpack(theta, n, m, r);
    }
    if (out.records.size() == 1) out.params = params0;
    return out;
}

namespace {

// column order He, N(0,1e-3), N(0,1e-1), Glorot, LeCun
int init_column(const InitSpec& init)
{
    switch (init.kind) {
    case InitKind::he:
        return 0;
    case InitKind::glorot:
        return 3;
    case InitKind::lecun:
        return 4;
    case InitKind::normal:
        if (init.sd == 1e-3) return 1;
        if (init.sd == 1e-1) return 2;
        break;
    }
    throw ConfigError("no tuned learning rate for init '" + init.name() + "'");
}

using Row = std::array<double, 5>;

} // namespace

TunedHyper tuned_hyper(OptimizerKind kind, BenchmarkSet set, const InitSpec& init)
{
    const int col = init_column(init);
    const int s = static_cast<int>(set);
    static const std::array<Row, 3> gd{{{1e-4, 1e-3, 1e-4, 1, 1},
                                        {1e-4, 0.01, 0.01, 0.01, 0.01},
                                        {0.01, 0.01, 0.01, 1e-3, 1e-3}}};
    static const std::array<Row, 3> gdc_lr{{{1, 1e-4, 1e-4, 1, 1},
                                            {1e-4, 0.01, 0.1, 0.1, 0.1},
                                            {1e-4, 0.01, 0.01, 0.01, 0.1}}};
    static const std::array<Row, 3> gdc_clip{{{6, 1, 1, 6, 6}, {3, 1, 1, 4, 1}, {1, 1, 4, 1.5, 0.5}}};
    static const std::array<Row, 3> gdnm{{{1e-3, 1e-4, 1e-4, 1e-4, 0.1},
                                          {1e-4, 0.01, 0.01, 0.01, 0.01},
                                          {0.01, 0.01, 0.01, 0.01, 0.01}}};
    static const std::array<Row, 3> sgd{{{0.1, 0.1, 0.1, 0.1, 0.1},
                                         {0.01, 0.01, 0.01, 0.01, 0.01},
                                         {0.01, 1e-3, 0.01, 0.01, 0.01}}};
    static const std::array<Row, 3> adam{{{0.1, 0.01, 0.01, 0.01, 0.01},
                                          {0.01, 0.01, 0.01, 0.01, 0.01},
                                          {0.01, 0.01, 0.01, 0.01, 0.01}}};
    switch (kind) {
    case OptimizerKind::gd:
        return {gd[s][col], 0.0};
    case OptimizerKind::gdc:
        return {gdc_lr[s][col], gdc_clip[s][col]};
    case OptimizerKind::gdnm:
        return {gdnm[s][col], 0.0};
    case OptimizerKind::sgd:
        return {sgd[s][col], 0.0};
    case OptimizerKind::adam:
        return {adam[s][col], 0.0};
    }
    return {};
}

int default_batch_size(BenchmarkSet set)
{
    switch (set) {
    case BenchmarkSet::synthetic_t10:
        return 2;
    case BenchmarkSet::sp500:
        return 50;
    case BenchmarkSet::synthetic_t500:
        return 100;
    }
    return 2;
}

} // namespace alrnn

#include <alrnn/rng.hpp>
#include <alrnn/verify.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace alrnn {

GridMinimum grid_minimize_1d(const std::function<double(double)>& phi, double lo, double hi,
                             double coarse_step, double refine_tol)
{
    if (!(lo < hi)) throw ConfigError("grid_minimize_1d: need lo < hi");
    if (!(coarse_step > 0.0 && refine_tol > 0.0)) {
        throw ConfigError("grid_minimize_1d: step and tolerance must be > 0");
    }
    const auto cells = static_cast<long>(std::ceil((hi - lo) / coarse_step));
    long best = 0;
    double best_val = phi(lo);
    for (long k = 1; k <= cells; ++k) {
        const double u = std::min(hi, lo + k * coarse_step);
        const double v = phi(u);
        if (v < best_val) {
            best_val = v;
            best = k;
        }
    }
    const double center = std::min(hi, lo + best * coarse_step);
    double a = std::max(lo, center - coarse_step);
    double b = std::min(hi, center + coarse_step);

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = phi(c);
    double fd = phi(d);
    while (b - a > refine_tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = phi(d);
        }
    }
    GridMinimum out{center, best_val};
    const double mid = 0.5 * (a + b);
    for (const double u : {mid, c, d}) {
        const double v = phi(u);
        if (v < out.value) out = {u, v};
    }
    return out;
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double rel_step)
{
    Vec g(x.size());
    Vec probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = rel_step * (1.0 + std::abs(x[i]));
        probe[i] = x[i] + h;
        const double fp = f(probe);
        probe[i] = x[i] - h;
        const double fm = f(probe);
        probe[i] = x[i];
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw NumericalError("fd_gradient: non-finite value at coordinate " + std::to_string(i));
        }
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

namespace {

LiftedPoint shifted(const LiftedPoint& base, const Vec& stacked)
{
    const int n = base.params.input_dim();
    const int m = base.params.output_dim();
    const int r = base.params.hidden_dim();
    const Dims dims{n, m, r, base.steps()};
    const auto nz = dims.nw() + dims.na();
    LiftedPoint out;
    out.params = RnnParams::unpack(stacked.head(nz), n, m, r);
    out.hidden = stacked.segment(nz, dims.rt());
    out.preact = stacked.tail(dims.rt());
    return out;
}

} // namespace

ProbeResult dstationary_probe(const LiftedPoint& point, const AlDuals& duals,
                              const AlProblem& prob, int probe_count, std::uint64_t seed)
{
    const Vec s = point.stacked();
    const double base = al_value(point, duals, prob);
    auto one_sided = [&](const Vec& dir) {
        // D(t) = (L(s + t d) - L(s)) / t is O(t) from its limit; Richardson on the two finest steps
        const double steps[3] = {1e-4, 1e-5, 1e-6};
        double est[3];
        for (int k = 0; k < 3; ++k) {
            est[k] = (al_value(shifted(point, s + steps[k] * dir), duals, prob) - base) / steps[k];
        }
        const double extrap = est[2] + (est[2] - est[1]) * steps[2] / (steps[1] - steps[2]);
        return std::min(extrap, est[2]);
    };

    ProbeResult out;
    out.min_derivative = std::numeric_limits<double>::infinity();
    Vec dir = Vec::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        for (const double sign : {1.0, -1.0}) {
            dir[i] = sign;
            out.min_derivative = std::min(out.min_derivative, one_sided(dir));
            ++out.directions;
        }
        dir[i] = 0.0;
    }
    Rng rng(seed, "verify.probe");
    for (int k = 0; k < probe_count; ++k) {
        for (Eigen::Index i = 0; i < s.size(); ++i) dir[i] = rng.normal(1.0);
        dir.normalize();
        out.min_derivative = std::min(out.min_derivative, one_sided(dir));
        ++out.directions;
    }
    return out;
}

} // namespace alrnn

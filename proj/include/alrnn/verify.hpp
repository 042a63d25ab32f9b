#pragma once

#include <alrnn/auglag.hpp>

#include <cstdint>
#include <functional>

namespace alrnn {

struct GridMinimum
{
    double u = 0.0;
    double value = 0.0;
};

/// Scans [lo, hi] with coarse_step, then golden-section refines around the
/// best grid cell until the bracket is below refine_tol.
GridMinimum grid_minimize_1d(const std::function<double(double)>& phi, double lo, double hi,
                             double coarse_step, double refine_tol);

/// Central differences with per-coordinate step rel_step * (1 + |x_i|).
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double rel_step = 1e-6);

struct ProbeResult
{
    double min_derivative = 0.0; // most negative one-sided estimate found
    int directions = 0;
};

/// One-sided directional derivative of L along +-e_i for every coordinate and
/// along probe_count random unit directions. Each estimate comes from forward
/// differences at steps 1e-4, 1e-5, 1e-6, extrapolated to step 0.
ProbeResult dstationary_probe(const LiftedPoint& point, const AlDuals& duals,
                              const AlProblem& prob, int probe_count, std::uint64_t seed = 0);

} // namespace alrnn

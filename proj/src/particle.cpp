#include "mtjrng/particle.hpp"

#include <cmath>

#include "mtjrng/errors.hpp"
#include "mtjrng/rng.hpp"

namespace mtjrng {

ParticleTrace simulate_particle(double x0, double alpha, double kBT, double dt, int n,
                                std::uint64_t seed) {
    if (!(alpha > 0.0) || !(dt > 0.0) || kBT < 0.0)
        throw OutOfRange("particle simulation requires alpha > 0, dt > 0, kBT >= 0");
    if (n < 1) throw OutOfRange("particle simulation requires at least one step");
    ParticleTrace trace;
    trace.dt = dt;
    trace.kBT = kBT;
    trace.alpha_true = alpha;
    trace.positions.reserve(static_cast<std::size_t>(n) + 1);
    trace.positions.push_back(x0);
    Rng rng(seed);
    const double step_sigma = std::sqrt(2.0 * kBT * dt / alpha);
    double x = x0;
    for (int i = 0; i < n; ++i) {
        x += step_sigma * rng.gauss();
        trace.positions.push_back(x);
    }
    return trace;
}

GammaSpec posterior_gamma(const ParticleTrace& trace) {
    if (trace.positions.size() < 2)
        throw DegenerateTrace("posterior needs at least two recorded positions");
    if (!(trace.kBT > 0.0) || !(trace.dt > 0.0))
        throw DegenerateTrace("posterior needs positive kBT and dt");
    const std::size_t n_inc = trace.positions.size() - 1;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n_inc; ++i) {
        const double zeta = trace.positions[i + 1] - trace.positions[i];
        sum_sq += zeta * zeta;
    }
    if (sum_sq == 0.0) throw DegenerateTrace("all increments are zero");
    GammaSpec spec;
    spec.shape = static_cast<double>(n_inc) / 2.0;
    spec.rate = sum_sq / (4.0 * trace.kBT * trace.dt);
    return spec;
}

} // namespace mtjrng

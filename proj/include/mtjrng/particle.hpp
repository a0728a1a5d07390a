#pragma once

#include <cstdint>
#include <vector>

#include "mtjrng/gamma_dist.hpp"

namespace mtjrng {

// Recorded over-damped Brownian trajectory of a tracked particle.
// Units: positions um, dt s, kBT pN*um, alpha pN*s/um.
struct ParticleTrace {
    std::vector<double> positions;
    double dt = 0.0;
    double kBT = 0.0;
    double alpha_true = 0.0; // generator input, kept for synthetic-data checks
};

// Euler-Maruyama walk X_{i+1} = X_i + sqrt(2*kBT*dt/alpha) * N(0,1), n steps.
ParticleTrace simulate_particle(double x0, double alpha, double kBT, double dt, int n,
                                std::uint64_t seed);

// Posterior over the drag coefficient given the trace increments:
// shape = n/2, rate = sum(zeta_i^2) / (4*kBT*dt) for n increments.
GammaSpec posterior_gamma(const ParticleTrace& trace);

} // namespace mtjrng

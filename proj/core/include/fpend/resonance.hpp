#pragma once

#include <vector>

#include "fpend/classical.hpp"
#include "fpend/separatrix.hpp"

namespace fpend {

/// A measured s:ell nonlinear resonance chain with the pendulum parameters
/// that reproduce it:  H_eff = (I - I0)^2 / (2 m0) + 2 V0 cos(ell theta).
struct ResonanceData {
    int s = 0;
    int ell = 1;
    double s_outer = 0.0;       // area enclosed by the outer separatrix
    double s_inner = 0.0;       // area enclosed by the inner separatrix
    double action_center = 0.0; // I0 = (S_outer + S_inner) / (4 pi)
    double effective_mass = 0.0;
    double coupling = 0.0;      // V0 > 0
    double trace_stable = 2.0;
    double omega_res = 0.0;     // libration frequency of the chain
    PeriodicOrbit stable_orbit;
    PeriodicOrbit unstable_orbit;
};

/// Inverts the pendulum relations
///   S_outer - S_inner = 16 sqrt(2 m0 V0),
///   omega_res = ell sqrt(2 V0 / m0) with omega_res ell tau = theta + 2 pi k,
/// where theta = arccos(trace/2); the 2 pi branch (and the reflection
/// 2 pi - theta) is fixed by the independently measured frequency hint.
ResonanceData resonance_parameters(double s_outer, double s_inner, double trace_stable,
                                   int ell, double omega_hint);

struct ChainSearchOptions {
    int profile_samples = 64;
    double profile_span = 0.9;
    int profile_periods = 400;
    int newton_guesses = 24;
    int libration_periods = 1500;
    int steps_per_period = kDefaultStrobeSteps;
    SeparatrixOptions separatrix;
};

/// Full pipeline: locate the s:ell chain inside the island via the rotation
/// profile, converge its stable and hyperbolic periodic orbits (the cells
/// nearest q = 0), trace the separatrix loops, and extract I0, m0, V0.
ResonanceData find_resonance_chain(const SystemParams& par, const IslandData& island, int s,
                                   int ell, const ChainSearchOptions& opt = {});

}  // namespace fpend

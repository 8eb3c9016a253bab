#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "fpend/classical.hpp"
#include "fpend/model.hpp"

namespace fpend {

/// Area-preserving map interface used by the manifold tracer, so the same
/// machinery runs on the driven-pendulum strobe map and on synthetic maps.
struct MapSystem {
    std::function<PhaseSpacePoint(const PhaseSpacePoint&)> map;
    std::function<std::pair<PhaseSpacePoint, Mat2>(const PhaseSpacePoint&)> map_tangent;
    /// Optional symmetry carrying a traced arc into the neighbouring chain
    /// cell (the one-period strobe map for s:ell chains); when absent every
    /// cell is traced directly.
    std::function<PhaseSpacePoint(const PhaseSpacePoint&)> arc_symmetry;
};

struct SeparatrixAreas {
    double outer = 0.0;
    double inner = 0.0;
};

struct SeparatrixOptions {
    double seed_offset = 1e-8;    // displacement along the unstable eigenvector
    double arrive_tol = 1e-4;     // proximity to a neighbouring hyperbolic point
    int seeds_per_segment = 32;
    int max_applications = 400;
    double escape_factor = 3.0;   // escape radius in units of the chain radius
    double min_expansion = 1.3;   // seed-segment span when the multiplier is weak
    /// chains around an island center are contractible loops (sorted by the
    /// angle about the center); a chain of a plain pendulum winds the whole
    /// cylinder instead and its loops are p(q) graphs
    bool cylinder_band = false;
};

/// Traces the unstable-manifold loops of a hyperbolic chain (all points of the
/// ell-fold-map fixed set given in `chain_points`) and returns the areas of
/// the closed outer and inner separatrix polygons around `center`.
SeparatrixAreas trace_separatrix_areas(const MapSystem& sys,
                                       const std::vector<PhaseSpacePoint>& chain_points,
                                       const PhaseSpacePoint& center,
                                       const SeparatrixOptions& opt = {});

/// Driven-pendulum entry point: the chain is the hyperbolic periodic orbit of
/// the s:ell resonance found by find_periodic_orbit.
SeparatrixAreas separatrix_areas(const SystemParams& par, const PeriodicOrbit& chain,
                                 const PhaseSpacePoint& island_center,
                                 int steps_per_period = kDefaultStrobeSteps,
                                 const SeparatrixOptions& opt = {});

}  // namespace fpend

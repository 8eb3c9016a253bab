#include "fpend/resonance.hpp"

#include <algorithm>
#include <cmath>

#include "fpend/errors.hpp"

namespace fpend {

ResonanceData resonance_parameters(double s_outer, double s_inner, double trace_stable,
                                   int ell, double omega_hint) {
    if (!(s_outer > s_inner) || !(s_inner > 0.0))
        throw std::invalid_argument("resonance_parameters: need S_outer > S_inner > 0");
    if (!(std::abs(trace_stable) < 2.0))
        throw std::domain_error("resonance_parameters: |trace| must be < 2");
    if (ell < 1) throw std::invalid_argument("resonance_parameters: ell must be >= 1");

    const double theta = std::acos(0.5 * trace_stable);  // in [0, pi]
    const double period = ell * kTau;

    // rotation angle over ell periods is theta or 2 pi - theta, modulo 2 pi;
    // pick the candidate closest to the measured libration frequency
    double best_phi = theta;
    if (omega_hint > 0.0) {
        double best_err = std::numeric_limits<double>::infinity();
        for (double base : {theta, kTau - theta}) {
            for (int k = 0; k < 64; ++k) {
                double phi = base + kTau * k;
                double err = std::abs(phi / period - omega_hint);
                if (err < best_err) {
                    best_err = err;
                    best_phi = phi;
                }
            }
        }
    }
    const double omega_res = best_phi / period;

    ResonanceData res;
    res.ell = ell;
    res.s_outer = s_outer;
    res.s_inner = s_inner;
    res.trace_stable = trace_stable;
    res.omega_res = omega_res;
    res.action_center = (s_outer + s_inner) / (2.0 * kTau);

    const double ds = s_outer - s_inner;       // = 16 sqrt(2 m0 V0)
    res.coupling = ds * omega_res / (32.0 * ell);
    res.effective_mass = ds * ds / (512.0 * res.coupling);
    return res;
}

namespace {

// deduplicate periodic orbits: two Newton runs land on the same chain if one
// anchor appears among the other's strobe images
bool same_chain(const StrobeMap& strobe, const PeriodicOrbit& a, const PeriodicOrbit& b) {
    PhaseSpacePoint x = a.anchor;
    for (int k = 0; k < a.period_multiplier; ++k) {
        if (phase_space_distance(x, b.anchor) < 1e-6) return true;
        x = strobe.apply(x);
    }
    return false;
}

}  // namespace

ResonanceData find_resonance_chain(const SystemParams& par, const IslandData& island, int s,
                                   int ell, const ChainSearchOptions& opt) {
    const double target = double(s) / ell;
    auto profile = rotation_profile(par, island, opt.profile_samples, opt.profile_span,
                                    opt.profile_periods);
    if (profile.size() < 4)
        throw NoConvergence("find_resonance_chain: rotation profile too sparse");

    // radii where the rotation number crosses s/ell
    std::vector<double> crossings;
    for (size_t i = 1; i < profile.size(); ++i) {
        double f0 = profile[i - 1].omega - target;
        double f1 = profile[i].omega - target;
        if (f0 == 0.0) crossings.push_back(profile[i - 1].seed.p - island.center.p);
        if (f0 * f1 < 0.0) {
            double r0 = profile[i - 1].seed.p - island.center.p;
            double r1 = profile[i].seed.p - island.center.p;
            crossings.push_back(r0 + (r1 - r0) * f0 / (f0 - f1));
        }
    }
    if (crossings.empty())
        throw NoConvergence("find_resonance_chain: rotation profile never crosses s/ell");

    StrobeMap strobe(par, opt.steps_per_period);
    std::vector<PeriodicOrbit> found;

    for (double r : crossings) {
        for (double shift : {0.0, 0.3, -0.3, 0.6}) {
            double rr = r * (1.0 + 0.12 * shift);
            // walk the crossing orbit; its strobe points straddle the chain
            TrackOptions topt;
            topt.periods = 4 * ell * std::max(2, opt.newton_guesses / (2 * ell));
            topt.rotation_center = island.center;
            TrackResult ring =
                track_orbit(par, {island.center.p + rr, island.center.q}, topt);
            int stride = std::max<int>(1, static_cast<int>(ring.strobe.size()) /
                                              opt.newton_guesses);
            for (size_t g = 0; g < ring.strobe.size(); g += stride) {
                try {
                    PeriodicOrbit po = find_periodic_orbit(par, ring.strobe[g], ell,
                                                           island.center,
                                                           opt.steps_per_period);
                    if (po.winding != std::abs(s)) continue;
                    if (phase_space_distance(po.anchor, island.center) < 1e-4)
                        continue;  // fell back onto the island center
                    bool dup = false;
                    for (const auto& known : found)
                        if (same_chain(strobe, known, po)) {
                            dup = true;
                            break;
                        }
                    if (!dup) found.push_back(po);
                } catch (const NumericalError&) {
                    continue;
                }
            }
            bool have_stable = false, have_unstable = false;
            for (const auto& po : found) {
                (po.stable() ? have_stable : have_unstable) = true;
            }
            if (have_stable && have_unstable) break;
        }
        bool have_stable = false, have_unstable = false;
        for (const auto& po : found) (po.stable() ? have_stable : have_unstable) = true;
        if (have_stable && have_unstable) break;
    }

    // keep the cells nearest q = 0 (eroded chains make cells inequivalent)
    const PeriodicOrbit* stable = nullptr;
    const PeriodicOrbit* unstable = nullptr;
    for (const auto& po : found) {
        const PeriodicOrbit*& slot = po.stable() ? stable : unstable;
        if (!slot || std::abs(angle_diff(po.anchor.q, island.center.q)) <
                         std::abs(angle_diff(slot->anchor.q, island.center.q)))
            slot = &po;
    }
    if (!stable || !unstable)
        throw NoConvergence("find_resonance_chain: could not converge both the stable and "
                            "hyperbolic chain orbits");

    // The tangent flow along the chain orbit winds with the orbital motion
    // around the main island (an integer number of turns per ell periods)
    // plus the slow chain libration; folding out the whole turns leaves the
    // libration phase that fixes the acos branch.
    double rate = measure_libration_frequency(par, stable->anchor, opt.libration_periods,
                                              opt.steps_per_period);
    double phi = rate * ell * kTau;
    double omega_meas = std::abs(phi - kTau * std::round(phi / kTau)) / (ell * kTau);
    SeparatrixAreas areas =
        separatrix_areas(par, *unstable, island.center, opt.steps_per_period, opt.separatrix);

    ResonanceData res = resonance_parameters(areas.outer, areas.inner, stable->trace, ell,
                                             omega_meas);
    res.s = std::abs(s);
    res.stable_orbit = *stable;
    res.unstable_orbit = *unstable;
    return res;
}

}  // namespace fpend

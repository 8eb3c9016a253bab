#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fpend/classical.hpp"
#include "fpend/floquet.hpp"
#include "fpend/phase_space.hpp"
#include "fpend/rat.hpp"

namespace fpend {

struct SweepConfig {
    double gamma = 0.72;
    double inv_hbar_min = 5.0;
    double inv_hbar_max = 45.0;
    int points = 200;
    double sigma_filter = 7e-3;
    double p_bound = 4.0;
    int steps_per_period = kDefaultPropagatorSteps;
    std::optional<PhaseSpacePoint> probe_center;  // default: computed island center
    bool audit = true;
    bool with_levels = false;  // also record the filtered relative spectrum
    int threads = 0;           // 0 = leave the OpenMP default

    double inv_hbar_at(int i) const {
        if (points == 1) return inv_hbar_min;
        return inv_hbar_min + (inv_hbar_max - inv_hbar_min) * i / (points - 1.0);
    }
    void validate() const;
};

struct LevelEntry {
    double rel_quasienergy = 0.0;  // circle-calibrated against the doublet mean
    double sigma = 0.0;
    int parity = 0;
};

struct SplittingRecord {
    double inv_hbar = 0.0;
    double delta = 0.0;
    double eps_plus = 0.0, eps_minus = 0.0;
    double sigma_plus = 0.0, sigma_minus = 0.0;
    bool ambiguous = false;
    bool audited = false;
    bool certified = false;
    double audit_drift = 0.0;
    int n_max = 0;
    int steps = 0;
    std::string error;  // non-empty when this grid point failed

    std::vector<LevelEntry> levels;  // sigma >= filter, when requested
    int retained_count = 0;

    bool ok() const { return error.empty(); }
};

struct SweepResult {
    SweepConfig config;
    PhaseSpacePoint probe;
    double omega0 = 0.0;
    double omega0_raw = 0.0;
    std::vector<SplittingRecord> records;  // one per grid point, in grid order
};

/// Builds basis, propagator, spectrum and doublet at every grid point.
/// Failures are recorded per row; output order is the grid order regardless
/// of the execution schedule.
SweepResult splitting_sweep(const SweepConfig& config);

/// Same sweep with the sigma-filtered relative spectrum attached to each row.
SweepResult level_dynamics(const SweepConfig& config);

struct RatCurveRow {
    double inv_hbar = 0.0;
    double delta_quantum = 0.0;
    bool quantum_ok = false;
    bool certified = false;
    bool ambiguous = false;
    int k_c = 0;
    double v_eff = 0.0;
    double mean = 0.0, band_lo = 0.0, band_hi = 0.0;
    double pn_estimate = 0.0;
    std::string mechanism;  // "single:s/ell" or "two_step:sa/ella+sb/ellb"
    std::string error;
};

/// Merges the quantum sweep with the semiclassical prediction per grid point.
/// With two resonances the mechanism switches to the two-step coupling where
/// admissible; otherwise the chain with the largest V0 drives a single-step
/// prediction. Poles are emitted as +inf markers.
std::vector<RatCurveRow> rat_overlay(const SweepResult& sweep,
                                     const std::vector<ResonanceData>& resonances,
                                     double chaos_border_action, double island_area);

}  // namespace fpend

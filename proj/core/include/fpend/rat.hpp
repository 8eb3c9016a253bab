#pragma once

#include <utility>
#include <vector>

#include "fpend/resonance.hpp"

namespace fpend {

/// I_n = hbar (n + 1/2), the quantized actions of the island modes.
double quantized_action(int n, double hbar);

/// E_n = [hbar(n + 1/2) - I0]^2 / (2 m0) in the co-rotating frame of the
/// resonance.
double unperturbed_energy(int n, const ResonanceData& res, double hbar);

/// Smallest k >= 1 with I_{k ell} beyond the chaos border I_c: the number of
/// perturbative steps needed to reach the chaotic domain.
int chain_length(const ResonanceData& res, double chaos_border_action, double hbar);

/// V_eff = V0 prod_{k=1}^{k_c - 1} V0 / (E_0 - E_{k ell}).
double effective_coupling(const ResonanceData& res, double chaos_border_action, double hbar);

/// Two-step coupling via a second resonance:
/// V_eff = V0_a / (E_0^a - E_{ell_a}^a) * V0_b, valid while the first excited
/// rung I_{ell_a} lies between the two chains.
double effective_coupling_two_step(const ResonanceData& res_a, const ResonanceData& res_b,
                                   double hbar);

/// The 1/hbar value at which the two-step coupling becomes admissible
/// (I_{ell_a} = I0_b).
double two_step_boundary_inv_hbar(const ResonanceData& res_a, const ResonanceData& res_b);

/// Coefficients of the perturbed central state over |k ell>, k = 0 .. k_c - 1
/// (unnormalized; leading order in V0).
std::vector<double> perturbed_central_state(const ResonanceData& res,
                                            double chaos_border_action, double hbar);

struct SplittingScale {
    double mean = 0.0;     // geometric-mean splitting 2 pi V_eff^2 / hbar
    double band_lo = 0.0;  // mean * exp(-pi/2)
    double band_hi = 0.0;  // mean * exp(+pi/2)
};

SplittingScale mean_splitting(double v_eff, double hbar);

/// Cauchy density of the splitting, scale s: P(x) = (2/pi) s / (x^2 + s^2).
double cauchy_splitting_pdf(double x, double scale);

struct LogMoments {
    double log_mean = 0.0;      // ln(scale)
    double log_variance = 0.0;  // pi^2 / 4
};

/// Closed-form logarithmic moments of the Cauchy splitting distribution.
LogMoments cauchy_log_moments(double scale);

/// The same moments by numerical quadrature (cross-check path).
LogMoments cauchy_log_moments_quadrature(double scale);

enum class PnBranch { IncompleteGamma, Asymptotic };

struct PnEstimate {
    double value = 0.0;
    PnBranch branch = PnBranch::Asymptotic;
    double n_states = 0.0;  // N = A / (2 pi hbar)
};

/// Area-only splitting estimate: hbar Omega Gamma(2N, 4N) / Gamma(2N+1) for
/// N <= 3, else the printed asymptotic hbar Omega e^{-2(1-ln2)N} / (16 pi N^3).
PnEstimate pn_splitting_estimate(double island_area, double hbar, double omega_prefactor = 1.0);

}  // namespace fpend

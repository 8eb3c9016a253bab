#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "fpend/errors.hpp"
#include "fpend/model.hpp"

namespace fpend {

/// Momentum eigenbasis on the cylinder: states |n> with p_n = hbar*n for
/// n = -n_max .. n_max (Bloch angle fixed to 0 so p -> -p stays a symmetry
/// of the lattice).
struct MomentumBasis {
    double hbar = 1.0 / 16.0;
    int n_max = 64;

    MomentumBasis() = default;
    MomentumBasis(double hb, int nm) : hbar(hb), n_max(nm) {
        if (hb <= 0.0 || nm < 1) throw std::invalid_argument("MomentumBasis: bad arguments");
    }

    int dim() const { return 2 * n_max + 1; }
    int index_of(int n) const { return n + n_max; }   // n in [-n_max, n_max]
    int n_of(int index) const { return index - n_max; }
    double momentum(int index) const { return hbar * n_of(index); }
    double p_cutoff() const { return hbar * n_max; }
};

/// Cutoff rule n_max = ceil(p_bound / hbar): the chaotic sea lies well inside
/// |p| < p_bound = 4 and the audit guards the truncation.
MomentumBasis make_basis(double hbar, double p_bound = 4.0);

inline constexpr int kDefaultPropagatorSteps = 512;

/// One-period evolution operator U(tau, 0) in the momentum basis, built from
/// kinetic/potential split steps (midpoint time sampling, 4th-order
/// composition) with FFTs moving between the momentum and angle grids.
Eigen::MatrixXcd build_propagator(const SystemParams& par, const MomentumBasis& basis,
                                  int steps_per_period = kDefaultPropagatorSteps);

/// Largest |(U^dag U - 1)_ij|; full O(dim^3) product, used by tests/audits.
double unitarity_defect(const Eigen::MatrixXcd& u);

/// Quasienergy reduced to the canonical Floquet zone (-hbar/2, hbar/2]
/// (zone width 2*pi*hbar/tau = hbar).
inline double canonical_quasienergy(double eps, double hbar) {
    double w = std::remainder(eps, hbar);
    if (w <= -0.5 * hbar) w += hbar;
    return w;
}

/// Distance between two quasienergies on the Floquet circle.
inline double circle_distance(double e1, double e2, double hbar) {
    double d = std::abs(std::remainder(e1 - e2, hbar));
    return std::min(d, hbar - d);
}

struct FloquetSpectrum {
    double hbar = 0.0;
    double gamma_plus = 0.0;
    double gamma_minus = 0.0;
    int n_max = 0;
    int steps_per_period = 0;
    bool symmetric = false;

    /// Quasienergies in the canonical zone, ascending.
    std::vector<double> quasienergies;
    /// Matching eigenvectors (momentum components) as columns.
    Eigen::MatrixXcd vectors;
    /// +1 / -1 parity sector labels in symmetric mode, 0 otherwise.
    std::vector<int> parity;
    /// max | |lambda| - 1 | over the eigenvalues.
    double eigenvalue_modulus_defect = 0.0;

    int dim() const { return static_cast<int>(quasienergies.size()); }
};

/// Unitary eigendecomposition of the propagator. In symmetric mode the
/// operator is split into even/odd parity sectors, where the time-reversal
/// symmetry makes each block complex symmetric; its commuting real and
/// imaginary parts are then diagonalized simultaneously, which keeps
/// symmetry-related doublets numerically uncoupled down to splittings many
/// orders below the mean level spacing.
FloquetSpectrum diagonalize(const Eigen::MatrixXcd& u, const SystemParams& par,
                            const MomentumBasis& basis,
                            int steps_per_period = kDefaultPropagatorSteps);

struct AuditReport {
    double delta_base = 0.0;
    double delta_refined = 0.0;
    double drift = 0.0;       // relative difference between the two
    bool certified = false;   // drift < 5%
    int n_max_refined = 0;
    int steps_refined = 0;
};

/// Re-computes the probed doublet splitting with n_max enlarged by 25% and
/// twice the time steps; the splitting is certified when the relative drift
/// stays below 5%.
AuditReport convergence_audit(const SystemParams& par, const MomentumBasis& basis,
                              const PhaseSpacePoint& probe_center,
                              int steps_per_period = kDefaultPropagatorSteps);

}  // namespace fpend

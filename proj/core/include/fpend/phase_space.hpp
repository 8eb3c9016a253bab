#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "fpend/floquet.hpp"
#include "fpend/model.hpp"

namespace fpend {

/// Minimum-uncertainty Gaussian probe on the cylinder (unsqueezed:
/// momentum width sqrt(hbar/2)).
struct CoherentState {
    double p0 = 0.0;
    double q0 = 0.0;
    double hbar = 1.0 / 16.0;

    double width_p() const { return std::sqrt(0.5 * hbar); }
};

/// Momentum components c_n ~ exp(-(hbar n - p0)^2 / (2 hbar)) exp(-i n q0),
/// normalized over the truncated basis.
Eigen::VectorXcd coherent_vector(const MomentumBasis& basis, const CoherentState& cs);

/// sigma_m = |<z|psi_m>| for every eigenstate, in spectrum order.
std::vector<double> overlaps(const FloquetSpectrum& spectrum, const Eigen::VectorXcd& probe);

/// The tunnelling pair: the two eigenstates of maximal overlap with the
/// island-centre probe.
struct DoubletRecord {
    double eps_plus = 0.0;    // member labelled "+" (even sector when known)
    double eps_minus = 0.0;
    double delta = 0.0;       // circle distance of the pair
    double sigma_plus = 0.0;
    double sigma_minus = 0.0;
    int index_plus = -1;      // spectrum indices
    int index_minus = -1;
    bool ambiguous = false;   // 2nd and 3rd overlaps within 10% (near-crossing)
};

DoubletRecord select_doublet(const FloquetSpectrum& spectrum, const Eigen::VectorXcd& probe);

/// Antiunitary symmetry image: c'_n = conj(c_{-n}) (maps the upper island
/// probe onto the lower one).
Eigen::VectorXcd symmetry_conjugate(const Eigen::VectorXcd& state, const MomentumBasis& basis);

/// +1 or -1 for symmetry-invariant states, from the relative sign of the
/// state's amplitude on the two islands.
int parity_label(const Eigen::VectorXcd& state, const MomentumBasis& basis,
                 const CoherentState& cs_upper);

struct HusimiGrid {
    double p_min = -2.0, p_max = 2.0;
    double q_min = -kPi, q_max = kPi;
    int np = 200, nq = 200;
};

struct HusimiField {
    HusimiGrid grid;
    std::vector<double> p_values, q_values;
    Eigen::MatrixXd intensity;  // (np x nq), |<z(p,q)|psi>|^2, relative scale
};

HusimiField husimi(const Eigen::VectorXcd& state, const MomentumBasis& basis,
                   const HusimiGrid& grid);

struct HarmonicIndex {
    int l = 0;
    double residual = 0.0;  // circle distance at the best l
};

/// Best l in 0..l_max matching eps_candidate ~ eps0 + l hbar omega0 (mod zone).
HarmonicIndex harmonic_index(double eps0, double eps_candidate, double omega0, double hbar,
                             int l_max = 15);

}  // namespace fpend

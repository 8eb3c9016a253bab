#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fpend {

inline constexpr double kTau = 2.0 * std::numbers::pi;  ///< drive period (fixed)
inline constexpr double kPi = std::numbers::pi;

/// Reduce an angle to the canonical interval [-pi, pi).
inline double wrap_angle(double q) {
    double w = q - kTau * std::floor((q + kPi) / kTau);
    if (w >= kPi) w -= kTau;   // guard against rounding at the seam
    if (w < -kPi) w += kTau;
    return w;
}

/// Signed circle difference a-b reduced to (-pi, pi].
inline double angle_diff(double a, double b) {
    double d = std::remainder(a - b, kTau);
    return d;
}

/// Physical configuration of the driven pendulum:
///   H(p,q,t) = p^2/2 - (gamma_plus/2) cos(q + t) - (gamma_minus/2) cos(q - t)
/// on the cylinder (q angle, p unbounded momentum), drive period tau = 2*pi.
struct SystemParams {
    double gamma_plus = 0.0;
    double gamma_minus = 0.0;
    double tau = kTau;      // fixed; all Floquet-zone arithmetic assumes 2*pi
    double hbar = 1.0 / 16.0;

    SystemParams() = default;
    SystemParams(double gp, double gm, double hb = 1.0 / 16.0)
        : gamma_plus(gp), gamma_minus(gm), hbar(hb) {
        validate();
    }
    static SystemParams symmetric(double gamma, double hb = 1.0 / 16.0) {
        return SystemParams(gamma, gamma, hb);
    }

    void validate() const {
        if (gamma_plus < 0.0 || gamma_minus < 0.0)
            throw std::invalid_argument("SystemParams: coupling gamma must be >= 0");
        if (hbar <= 0.0)
            throw std::invalid_argument("SystemParams: hbar must be > 0");
        if (tau != kTau)
            throw std::invalid_argument("SystemParams: tau is fixed to 2*pi");
    }

    /// Time-reversal doublets are only defined for equal couplings.
    bool symmetric_mode() const { return gamma_plus == gamma_minus; }
};

/// A point of the cylinder phase space. q is kept in [-pi, pi) by the maps;
/// intermediate integration may hold an unwrapped angle.
struct PhaseSpacePoint {
    double p = 0.0;
    double q = 0.0;

    PhaseSpacePoint() = default;
    PhaseSpacePoint(double p_, double q_) : p(p_), q(q_) {}

    PhaseSpacePoint wrapped() const { return {p, wrap_angle(q)}; }
};

/// Distance on the cylinder (q difference taken on the circle).
inline double phase_space_distance(const PhaseSpacePoint& a, const PhaseSpacePoint& b) {
    double dp = a.p - b.p;
    double dq = angle_diff(a.q, b.q);
    return std::sqrt(dp * dp + dq * dq);
}

inline double hamiltonian(const SystemParams& par, const PhaseSpacePoint& x, double t) {
    return 0.5 * x.p * x.p - 0.5 * par.gamma_plus * std::cos(x.q + t)
           - 0.5 * par.gamma_minus * std::cos(x.q - t);
}

struct Derivatives {
    double dp_dt = 0.0;
    double dq_dt = 0.0;
};

/// Hamilton's equations for the driven pendulum.
inline Derivatives equations_of_motion(const SystemParams& par, const PhaseSpacePoint& x,
                                       double t) {
    Derivatives d;
    d.dq_dt = x.p;
    d.dp_dt = -0.5 * par.gamma_plus * std::sin(x.q + t)
              - 0.5 * par.gamma_minus * std::sin(x.q - t);
    return d;
}

/// Which of the two symmetry-related islands (p near +1 or -1) a co-moving
/// frame refers to.
enum class IslandFrame { Upper, Lower };

/// Integrable pendulum energy in the frame co-moving with the resonant orbit:
/// upper island  H0 = (p-1)^2/2 - (gamma_minus/2) cos(q_comoving),
/// lower island  H0 = (p+1)^2/2 - (gamma_plus/2)  cos(q_comoving).
inline double pendulum_frame_energy(const SystemParams& par, const PhaseSpacePoint& x,
                                    IslandFrame frame = IslandFrame::Upper) {
    if (frame == IslandFrame::Upper) {
        double dp = x.p - 1.0;
        return 0.5 * dp * dp - 0.5 * par.gamma_minus * std::cos(x.q);
    }
    double dp = x.p + 1.0;
    return 0.5 * dp * dp - 0.5 * par.gamma_plus * std::cos(x.q);
}

}  // namespace fpend

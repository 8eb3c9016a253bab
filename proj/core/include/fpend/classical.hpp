#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fpend/errors.hpp"
#include "fpend/model.hpp"

namespace fpend {

/// 2x2 real matrix acting on tangent vectors (dp, dq).
struct Mat2 {
    double pp = 1.0, pq = 0.0;  // row 1: d p' / d(p, q)
    double qp = 0.0, qq = 1.0;  // row 2: d q' / d(p, q)

    static Mat2 identity() { return {}; }
    double det() const { return pp * qq - pq * qp; }
    double trace() const { return pp + qq; }

    Mat2 operator*(const Mat2& r) const {
        return {pp * r.pp + pq * r.qp, pp * r.pq + pq * r.qq,
                qp * r.pp + qq * r.qp, qp * r.pq + qq * r.qq};
    }
};

/// Fixed-step symplectic integrator for H = p^2/2 + V(q,t), composed from
/// kick-drift-kick leapfrog sub-steps with Yoshida's 4th-order coefficients.
/// The angle is kept unwrapped so windings can be read off directly.
class TrajectoryStepper {
  public:
    TrajectoryStepper(const SystemParams& par, const PhaseSpacePoint& x0, double t0 = 0.0)
        : par_(par), p_(x0.p), q_(x0.q), t_(t0) {
        if (!std::isfinite(x0.p) || !std::isfinite(x0.q) || !std::isfinite(t0))
            throw std::invalid_argument("TrajectoryStepper: non-finite initial state");
    }

    double force(double q, double t) const {
        return -0.5 * par_.gamma_plus * std::sin(q + t)
               - 0.5 * par_.gamma_minus * std::sin(q - t);
    }
    double force_q(double q, double t) const {
        return -0.5 * par_.gamma_plus * std::cos(q + t)
               - 0.5 * par_.gamma_minus * std::cos(q - t);
    }

    /// One 4th-order step of size h (may be negative).
    void step(double h) {
        leapfrog(kW1 * h);
        leapfrog(kW0 * h);
        leapfrog(kW1 * h);
    }

    /// Same, also accumulating the tangent map M <- dStep * M.
    void step_with_tangent(double h, Mat2& m) {
        leapfrog_tangent(kW1 * h, m);
        leapfrog_tangent(kW0 * h, m);
        leapfrog_tangent(kW1 * h, m);
    }

    double p() const { return p_; }
    double q_unwrapped() const { return q_; }
    double t() const { return t_; }
    PhaseSpacePoint point() const { return {p_, q_}; }
    PhaseSpacePoint point_wrapped() const { return {p_, wrap_angle(q_)}; }

  private:
    // Yoshida triple-jump coefficients.
    static constexpr double kCbrt2 = 1.2599210498948731647672106072782;
    static constexpr double kW1 = 1.0 / (2.0 - kCbrt2);
    static constexpr double kW0 = 1.0 - 2.0 * kW1;

    void leapfrog(double h) {
        p_ += 0.5 * h * force(q_, t_);
        q_ += h * p_;
        t_ += h;
        p_ += 0.5 * h * force(q_, t_);
    }

    void leapfrog_tangent(double h, Mat2& m) {
        double fq0 = force_q(q_, t_);
        p_ += 0.5 * h * force(q_, t_);
        q_ += h * p_;
        t_ += h;
        double fq1 = force_q(q_, t_);
        p_ += 0.5 * h * force(q_, t_);
        // kick(h/2) * drift(h) * kick(h/2) on (dp, dq)
        Mat2 k0{1.0, 0.5 * h * fq0, 0.0, 1.0};
        Mat2 d{1.0, 0.0, h, 1.0};
        Mat2 k1{1.0, 0.5 * h * fq1, 0.0, 1.0};
        m = k1 * (d * (k0 * m));
    }

    SystemParams par_;
    double p_, q_, t_;
};

/// Propagate from t0 to t1; the step count starts at 256 per period and is
/// doubled until the endpoint moves by less than tol.
PhaseSpacePoint integrate(const SystemParams& par, const PhaseSpacePoint& x0, double t0,
                          double t1, double tol = 1e-11);

inline constexpr int kDefaultStrobeSteps = 256;

/// The time-tau stroboscopic map of the driven pendulum (section at t = 0).
class StrobeMap {
  public:
    explicit StrobeMap(const SystemParams& par, int steps_per_period = kDefaultStrobeSteps)
        : par_(par), steps_(steps_per_period) {
        if (steps_ < 1) throw std::invalid_argument("StrobeMap: steps_per_period < 1");
    }

    const SystemParams& params() const { return par_; }
    int steps_per_period() const { return steps_; }

    /// One-period image with q reduced to [-pi, pi).
    PhaseSpacePoint apply(const PhaseSpacePoint& x) const;

    /// n-period image (n >= 0).
    PhaseSpacePoint apply_n(const PhaseSpacePoint& x, int n) const;

    /// n-period image together with the exact tangent map of the discrete flow.
    std::pair<PhaseSpacePoint, Mat2> apply_with_tangent(const PhaseSpacePoint& x,
                                                        int n = 1) const;

  private:
    SystemParams par_;
    int steps_;
};

/// Doubles the integrator resolution until the strobe image of probe changes
/// by less than tol; returns the calibrated steps-per-period.
int calibrate_strobe_steps(const SystemParams& par, const PhaseSpacePoint& probe,
                           double tol = 1e-11, int start = kDefaultStrobeSteps,
                           int max_steps = 1 << 16);

/// Monitored propagation over whole periods. When a rotation center is given,
/// its own trajectory is integrated in lockstep and the angle, swept area and
/// angular excursion of the difference vector are accumulated (relative
/// coordinates are frame independent and free of the intra-period wobble that
/// a fixed reference point would pick up).
struct TrackOptions {
    int periods = 400;
    int steps_per_period = kDefaultStrobeSteps;
    std::optional<PhaseSpacePoint> rotation_center;
    bool record_strobe = true;
};

struct TrackResult {
    std::vector<PhaseSpacePoint> strobe;   // wrapped section points, one per period
    double total_angle = 0.0;              // accumulated relative angle
    double swept_area = 0.0;               // integral of (1/2)(x dy - y dx), relative
    double max_excursion = 0.0;            // max |q - q_center|(t)
    PhaseSpacePoint final_point;           // wrapped
};

TrackResult track_orbit(const SystemParams& par, const PhaseSpacePoint& x0,
                        const TrackOptions& opt);

// ---------------------------------------------------------------------------
// Stroboscopic orbits and Poincare sections
// ---------------------------------------------------------------------------

enum class OrbitClass { Regular, Chaotic, Escaped };

struct StroboscopicOrbit {
    PhaseSpacePoint seed;
    std::vector<PhaseSpacePoint> points;  // one per period, wrapped
    OrbitClass classification = OrbitClass::Regular;
};

struct ClassifyOptions {
    double escape_bound = 4.0;        // |p| beyond which the orbit counts as escaped
    double pair_offset = 1e-9;        // initial separation of the companion orbit
    double divergence_threshold = 1e-3;
    int steps_per_period = kDefaultStrobeSteps;
};

/// Iterates the strobe map n_iter times and classifies the orbit with the
/// paired-orbit divergence criterion.
StroboscopicOrbit classify_orbit(const SystemParams& par, const PhaseSpacePoint& seed,
                                 int n_iter, const ClassifyOptions& opt = {});

std::vector<StroboscopicOrbit> poincare_section(const SystemParams& par,
                                                const std::vector<PhaseSpacePoint>& seeds,
                                                int n_iter,
                                                const ClassifyOptions& opt = {});

// ---------------------------------------------------------------------------
// Periodic orbits
// ---------------------------------------------------------------------------

struct PeriodicOrbit {
    PhaseSpacePoint anchor;   // fixed point of the ell-fold strobe map
    int period_multiplier = 1;
    int winding = 0;          // s: loops about the island center over ell periods
    double residual = 0.0;
    Mat2 monodromy;
    double trace = 2.0;

    bool stable() const { return std::abs(trace) < 2.0; }
};

/// Newton search for a fixed point of the ell-fold strobe map. The winding is
/// measured around `center` when given (sub-island chains); otherwise the net
/// angle winding of the continuous trajectory is used (main 1:1 island).
PeriodicOrbit find_periodic_orbit(const SystemParams& par, const PhaseSpacePoint& guess,
                                  int ell,
                                  std::optional<PhaseSpacePoint> center = std::nullopt,
                                  int steps_per_period = kDefaultStrobeSteps);

struct IslandData {
    PhaseSpacePoint center;
    /// small-oscillation frequency from the monodromy trace, acos branch
    /// folded into [0, 1/2] (the stroboscopic rotation-number convention)
    double omega0 = 0.0;
    /// continuous rotation rate of the tangent flow at the center; resolves
    /// the 2 pi ambiguity of the trace and feeds the quasienergy ladder
    double omega0_raw = 0.0;
    double area = 0.0;     // phase-space area of the island
    double action = 0.0;   // I_c = area / (2 pi), the chaos-border action
};

/// Locates the stable period-1 orbit near p_hint and its linearized frequency.
IslandData island_center_and_frequency(const SystemParams& par, double p_hint);

// ---------------------------------------------------------------------------
// Island area and rotation profile
// ---------------------------------------------------------------------------

struct IslandAreaOptions {
    int grid_p = 96;            // rows across center.p +/- span_p
    int grid_q = 96;            // columns across the full angle circle
    double span_p = 1.0;
    int n_iter = 2000;          // classification periods per seed
    int steps_per_period = 128; // classification stepping (coarser than maps)
    double pair_offset = 1e-9;
    double divergence_threshold = 1e-3;
    double escape_bound = 4.0;
};

/// Classifies a seed grid around the island center and flood-fills the
/// connected regular, center-librating region; area = cell count x cell area.
/// Throws GridTooCoarse when the filled region reaches the momentum edge of
/// the grid (the angle direction wraps).
IslandData island_area(const SystemParams& par, const IslandData& island,
                       const IslandAreaOptions& opt = {});

struct RotationSample {
    PhaseSpacePoint seed;
    double action = 0.0;      // loop area / 2 pi
    double omega = 0.0;       // rotation number folded into [0, 1/2]
    double omega_raw = 0.0;   // continuous rotation rate about the center
};

/// Rotation frequency and enclosed action along a momentum ray from the
/// island center; chaotic seeds are skipped.
std::vector<RotationSample> rotation_profile(const SystemParams& par, const IslandData& island,
                                             int n_samples, double span_p = 0.9,
                                             int periods = 400);

/// Continuous rotation frequency of a tangent vector along the orbit of
/// `anchor`; disambiguates the 2*pi branch that the monodromy trace loses.
double measure_libration_frequency(const SystemParams& par, const PhaseSpacePoint& anchor,
                                   int periods = 1500,
                                   int steps_per_period = kDefaultStrobeSteps);

}  // namespace fpend

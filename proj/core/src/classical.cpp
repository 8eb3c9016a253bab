#include "fpend/classical.hpp"

#include <algorithm>
#include <cmath>

namespace fpend {

namespace {

PhaseSpacePoint run_fixed(const SystemParams& par, const PhaseSpacePoint& x0, double t0,
                          double t1, long nsteps) {
    TrajectoryStepper s(par, x0, t0);
    const double h = (t1 - t0) / static_cast<double>(nsteps);
    for (long i = 0; i < nsteps; ++i) s.step(h);
    return s.point_wrapped();
}

}  // namespace

PhaseSpacePoint integrate(const SystemParams& par, const PhaseSpacePoint& x0, double t0,
                          double t1, double tol) {
    if (!std::isfinite(x0.p) || !std::isfinite(x0.q))
        throw std::invalid_argument("integrate: non-finite initial state");
    if (!std::isfinite(t0) || !std::isfinite(t1))
        throw std::invalid_argument("integrate: non-finite time bounds");
    if (t1 == t0) return x0.wrapped();

    const double span = std::abs(t1 - t0);
    long n = std::max<long>(16, static_cast<long>(std::ceil(kDefaultStrobeSteps * span / kTau)));
    PhaseSpacePoint coarse = run_fixed(par, x0, t0, t1, n);
    for (int it = 0; it < 8; ++it) {
        long n2 = 2 * n;
        PhaseSpacePoint fine = run_fixed(par, x0, t0, t1, n2);
        if (phase_space_distance(fine, coarse) < tol) return fine;
        n = n2;
        coarse = fine;
    }
    return coarse;
}

PhaseSpacePoint StrobeMap::apply(const PhaseSpacePoint& x) const { return apply_n(x, 1); }

PhaseSpacePoint StrobeMap::apply_n(const PhaseSpacePoint& x, int n) const {
    TrajectoryStepper s(par_, x, 0.0);
    const double h = kTau / steps_;
    const long total = static_cast<long>(n) * steps_;
    for (long i = 0; i < total; ++i) s.step(h);
    return s.point_wrapped();
}

std::pair<PhaseSpacePoint, Mat2> StrobeMap::apply_with_tangent(const PhaseSpacePoint& x,
                                                               int n) const {
    TrajectoryStepper s(par_, x, 0.0);
    Mat2 m = Mat2::identity();
    const double h = kTau / steps_;
    const long total = static_cast<long>(n) * steps_;
    for (long i = 0; i < total; ++i) s.step_with_tangent(h, m);
    return {s.point_wrapped(), m};
}

int calibrate_strobe_steps(const SystemParams& par, const PhaseSpacePoint& probe, double tol,
                           int start, int max_steps) {
    int steps = start;
    PhaseSpacePoint prev = StrobeMap(par, steps).apply(probe);
    while (steps < max_steps) {
        int next = 2 * steps;
        PhaseSpacePoint cur = StrobeMap(par, next).apply(probe);
        if (phase_space_distance(cur, prev) < tol) return steps;
        steps = next;
        prev = cur;
    }
    return steps;
}

TrackResult track_orbit(const SystemParams& par, const PhaseSpacePoint& x0,
                        const TrackOptions& opt) {
    TrackResult out;
    const double h = kTau / opt.steps_per_period;

    TrajectoryStepper s(par, x0, 0.0);
    std::optional<TrajectoryStepper> ref;
    if (opt.rotation_center) ref.emplace(par, *opt.rotation_center, 0.0);
    if (opt.record_strobe) out.strobe.reserve(opt.periods);

    double cx = 0.0, cy = 0.0;  // previous relative vector (q, p components)
    if (ref) {
        cx = s.q_unwrapped() - ref->q_unwrapped();
        cy = s.p() - ref->p();
    }

    for (int k = 0; k < opt.periods; ++k) {
        for (int i = 0; i < opt.steps_per_period; ++i) {
            s.step(h);
            if (ref) {
                ref->step(h);
                double x = s.q_unwrapped() - ref->q_unwrapped();
                double y = s.p() - ref->p();
                double cross = cx * y - cy * x;
                double dot = cx * x + cy * y;
                out.total_angle += std::atan2(cross, dot);
                out.swept_area += 0.5 * cross;
                double exc = std::abs(x);
                if (exc > out.max_excursion) out.max_excursion = exc;
                cx = x;
                cy = y;
            }
        }
        if (opt.record_strobe) out.strobe.push_back(s.point_wrapped());
    }
    out.final_point = s.point_wrapped();
    return out;
}

StroboscopicOrbit classify_orbit(const SystemParams& par, const PhaseSpacePoint& seed,
                                 int n_iter, const ClassifyOptions& opt) {
    StroboscopicOrbit orbit;
    orbit.seed = seed.wrapped();
    orbit.points.reserve(n_iter);

    TrajectoryStepper a(par, orbit.seed, 0.0);
    TrajectoryStepper b(par, {orbit.seed.p + opt.pair_offset, orbit.seed.q}, 0.0);
    const double h = kTau / opt.steps_per_period;

    for (int k = 0; k < n_iter; ++k) {
        for (int i = 0; i < opt.steps_per_period; ++i) {
            a.step(h);
            b.step(h);
        }
        orbit.points.push_back(a.point_wrapped());
        if (std::abs(a.p()) > opt.escape_bound) {
            orbit.classification = OrbitClass::Escaped;
            return orbit;
        }
        double dp = a.p() - b.p();
        double dq = angle_diff(a.q_unwrapped(), b.q_unwrapped());
        if (std::sqrt(dp * dp + dq * dq) > opt.divergence_threshold) {
            orbit.classification = OrbitClass::Chaotic;
            return orbit;
        }
    }
    orbit.classification = OrbitClass::Regular;
    return orbit;
}

std::vector<StroboscopicOrbit> poincare_section(const SystemParams& par,
                                                const std::vector<PhaseSpacePoint>& seeds,
                                                int n_iter, const ClassifyOptions& opt) {
    if (n_iter < 1) throw std::invalid_argument("poincare_section: n_iter must be >= 1");
    std::vector<StroboscopicOrbit> out;
    out.reserve(seeds.size());
    for (const auto& s : seeds) out.push_back(classify_orbit(par, s, n_iter, opt));
    return out;
}

PeriodicOrbit find_periodic_orbit(const SystemParams& par, const PhaseSpacePoint& guess,
                                  int ell, std::optional<PhaseSpacePoint> center,
                                  int steps_per_period) {
    if (ell < 1) throw std::invalid_argument("find_periodic_orbit: ell must be >= 1");
    StrobeMap map(par, steps_per_period);

    PhaseSpacePoint x = guess.wrapped();
    Mat2 mono = Mat2::identity();
    double res = 0.0;
    bool converged = false;

    for (int it = 0; it < 50; ++it) {
        auto [fx, m] = map.apply_with_tangent(x, ell);
        double rp = fx.p - x.p;
        double rq = angle_diff(fx.q, x.q);
        res = std::sqrt(rp * rp + rq * rq);
        mono = m;
        if (res < 1e-12) {
            converged = true;
            break;
        }
        // Newton on F(x) = map^ell(x) - x
        double j11 = m.pp - 1.0, j12 = m.pq;
        double j21 = m.qp, j22 = m.qq - 1.0;
        double det = j11 * j22 - j12 * j21;
        double scale = std::max({1.0, std::abs(j11), std::abs(j12), std::abs(j21),
                                 std::abs(j22)});
        if (std::abs(det) < 1e-12 * scale * scale)
            throw SingularJacobian("find_periodic_orbit: singular Newton Jacobian "
                                   "(parabolic or degenerate orbit)");
        double dp = -(j22 * rp - j12 * rq) / det;
        double dq = -(-j21 * rp + j11 * rq) / det;
        double norm = std::sqrt(dp * dp + dq * dq);
        const double max_step = 0.25;
        if (norm > max_step) {
            dp *= max_step / norm;
            dq *= max_step / norm;
        }
        x = PhaseSpacePoint{x.p + dp, wrap_angle(x.q + dq)};
    }
    if (!converged)
        throw NoConvergence("find_periodic_orbit: Newton did not converge in 50 iterations");

    PeriodicOrbit orbit;
    orbit.anchor = x;
    orbit.period_multiplier = ell;
    orbit.residual = res;
    orbit.monodromy = mono;
    orbit.trace = mono.trace();

    // Winding: loops of the continuous trajectory about the island center in
    // the co-moving frame; for the central orbit itself, the net angle winding.
    bool about_center = center.has_value() &&
                        phase_space_distance(x, *center) > 1e-5;
    if (about_center) {
        TrackOptions topt;
        topt.periods = ell;
        topt.steps_per_period = steps_per_period;
        topt.rotation_center = center;
        topt.record_strobe = false;
        TrackResult tr = track_orbit(par, x, topt);
        int raw = static_cast<int>(std::lround(std::abs(tr.total_angle) / kTau)) % ell;
        // stroboscopic cell-advance convention: a chain looping ell - s times
        // continuously advances s cells per period under the section map
        orbit.winding = std::min(raw, ell - raw);
    } else {
        TrajectoryStepper s(par, x, 0.0);
        const double h = kTau / steps_per_period;
        for (long i = 0; i < static_cast<long>(ell) * steps_per_period; ++i) s.step(h);
        orbit.winding = static_cast<int>(std::lround((s.q_unwrapped() - x.q) / kTau));
    }
    return orbit;
}

IslandData island_center_and_frequency(const SystemParams& par, double p_hint) {
    PeriodicOrbit po = find_periodic_orbit(par, {p_hint, 0.0}, 1);
    if (!po.stable())
        throw NoConvergence("island_center_and_frequency: found orbit is not elliptic");
    IslandData island;
    island.center = po.anchor;
    double theta = std::acos(0.5 * po.trace);
    island.omega0 = theta / kTau;
    // the trace leaves the branch open; a short tangent-flow run selects it
    double measured = measure_libration_frequency(par, po.anchor, 200);
    double best = theta / kTau, err = std::abs(best - measured);
    for (int k = 0; k < 4; ++k)
        for (double base : {theta + kTau * k, kTau * (k + 1) - theta}) {
            double cand = base / kTau;
            if (std::abs(cand - measured) < err) {
                err = std::abs(cand - measured);
                best = cand;
            }
        }
    island.omega0_raw = best;
    return island;
}

}  // namespace fpend

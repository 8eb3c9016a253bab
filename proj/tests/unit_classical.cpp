#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fpend/classical.hpp"
#include "fpend/model.hpp"

using namespace fpend;

namespace {
std::mt19937 rng(20260810u);
double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}
}  // namespace

TEST_CASE("hamiltonian: closed-form values") {
    CHECK(hamiltonian(SystemParams::symmetric(0.0), {1.0, 0.0}, 0.0) == doctest::Approx(0.5));
    CHECK(hamiltonian(SystemParams::symmetric(0.72), {0.0, 0.0}, 0.0) ==
          doctest::Approx(-0.72));
    // cos(q + pi/2) + cos(q - pi/2) = 0 for any q
    for (int i = 0; i < 10; ++i) {
        double p = uniform(-2, 2), q = uniform(-kPi, kPi);
        CHECK(hamiltonian(SystemParams::symmetric(uniform(0, 1)), {p, q}, kPi / 2) ==
              doctest::Approx(0.5 * p * p).epsilon(1e-12));
    }
}

TEST_CASE("hamiltonian: time-reversal and periodicity") {
    SystemParams par = SystemParams::symmetric(0.63);
    for (int i = 0; i < 200; ++i) {
        double p = uniform(-3, 3), q = uniform(-kPi, kPi), t = uniform(-10, 10);
        double h = hamiltonian(par, {p, q}, t);
        CHECK(h == doctest::Approx(hamiltonian(par, {-p, q}, -t)).epsilon(1e-13));
        CHECK(h == doctest::Approx(hamiltonian(par, {p, q + kTau}, t)).epsilon(1e-13));
        CHECK(h == doctest::Approx(hamiltonian(par, {p, q}, t + kTau)).epsilon(1e-13));
    }
}

TEST_CASE("equations_of_motion: closed-form values") {
    auto d0 = equations_of_motion(SystemParams::symmetric(0.0), {2.0, 1.0}, 0.0);
    CHECK(d0.dp_dt == doctest::Approx(0.0));
    CHECK(d0.dq_dt == doctest::Approx(2.0));

    auto d1 = equations_of_motion(SystemParams::symmetric(0.5), {0.7, 0.0}, 0.0);
    CHECK(d1.dp_dt == doctest::Approx(0.0));
    CHECK(d1.dq_dt == doctest::Approx(0.7));

    auto d2 = equations_of_motion(SystemParams::symmetric(0.72), {0.3, kPi / 2}, 0.0);
    CHECK(d2.dp_dt == doctest::Approx(-0.72));
    CHECK(d2.dq_dt == doctest::Approx(0.3));
}

TEST_CASE("equations_of_motion matches central differences of H") {
    SystemParams par(0.4, 0.9);
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        double p = uniform(-2, 2), q = uniform(-kPi, kPi), t = uniform(0, kTau);
        auto d = equations_of_motion(par, {p, q}, t);
        double dH_dp =
            (hamiltonian(par, {p + h, q}, t) - hamiltonian(par, {p - h, q}, t)) / (2 * h);
        double dH_dq =
            (hamiltonian(par, {p, q + h}, t) - hamiltonian(par, {p, q - h}, t)) / (2 * h);
        CHECK(d.dq_dt == doctest::Approx(dH_dp).epsilon(1e-8));
        CHECK(d.dp_dt == doctest::Approx(-dH_dq).epsilon(1e-8));
    }
}

TEST_CASE("pendulum_frame_energy: closed-form values") {
    SystemParams par = SystemParams::symmetric(0.72);
    CHECK(pendulum_frame_energy(par, {1.0, kPi / 2}) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(pendulum_frame_energy(par, {1.0, 0.0}) == doctest::Approx(-0.36));
    SystemParams small = SystemParams::symmetric(0.1);
    CHECK(pendulum_frame_energy(small, {1.0, kPi}) == doctest::Approx(0.05));
    // mirror island
    CHECK(pendulum_frame_energy(par, {-1.0, 0.0}, IslandFrame::Lower) ==
          doctest::Approx(-0.36));
}

TEST_CASE("integrate: free drift is exact") {
    SystemParams par = SystemParams::symmetric(0.0);
    for (int i = 0; i < 20; ++i) {
        double p = uniform(-2, 2), q = uniform(-kPi, kPi), span = uniform(0.5, 40.0);
        auto x1 = integrate(par, {p, q}, 0.0, span);
        CHECK(x1.p == doctest::Approx(p).epsilon(1e-14));
        CHECK(angle_diff(x1.q, q + p * span) == doctest::Approx(0.0).epsilon(1e-10));
    }
}

TEST_CASE("integrate: forward then backward returns the start") {
    SystemParams par = SystemParams::symmetric(0.72);
    for (int i = 0; i < 10; ++i) {
        PhaseSpacePoint x0{uniform(-1.5, 1.5), uniform(-kPi, kPi)};
        auto fwd = integrate(par, x0, 0.0, kTau);
        auto back = integrate(par, fwd, kTau, 0.0);
        CHECK(phase_space_distance(back, x0) < 1e-10);
    }
}

TEST_CASE("integrate rejects non-finite input") {
    SystemParams par = SystemParams::symmetric(0.3);
    CHECK_THROWS_AS(integrate(par, {std::nan(""), 0.0}, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("strobe map: free rotor closed form") {
    StrobeMap map(SystemParams::symmetric(0.0));
    auto a = map.apply({1.0, 0.3});
    CHECK(phase_space_distance(a, {1.0, 0.3}) < 1e-10);  // p=1 is period-1
    auto b = map.apply({0.5, 0.0});
    CHECK(b.p == doctest::Approx(0.5));
    CHECK(angle_diff(b.q, kPi) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("strobe map: area preservation at random points") {
    StrobeMap map(SystemParams::symmetric(0.72));
    const double d = 1e-6;
    for (int i = 0; i < 100; ++i) {
        PhaseSpacePoint x{uniform(-2, 2), uniform(-kPi, kPi)};
        auto pp = map.apply({x.p + d, x.q});
        auto pm = map.apply({x.p - d, x.q});
        auto qp = map.apply({x.p, x.q + d});
        auto qm = map.apply({x.p, x.q - d});
        double j11 = (pp.p - pm.p) / (2 * d);
        double j12 = (qp.p - qm.p) / (2 * d);
        double j21 = angle_diff(pp.q, pm.q) / (2 * d);
        double j22 = angle_diff(qp.q, qm.q) / (2 * d);
        CHECK(std::abs(j11 * j22 - j12 * j21 - 1.0) < 1e-6);
    }
}

TEST_CASE("strobe map: exact tangent agrees with finite differences") {
    StrobeMap map(SystemParams::symmetric(0.72));
    const double d = 1e-6;
    for (int i = 0; i < 20; ++i) {
        PhaseSpacePoint x{uniform(-2, 2), uniform(-kPi, kPi)};
        auto [fx, m] = map.apply_with_tangent(x);
        CHECK(std::abs(m.det() - 1.0) < 1e-10);
        auto pp = map.apply({x.p + d, x.q});
        auto pm = map.apply({x.p - d, x.q});
        CHECK(m.pp == doctest::Approx((pp.p - pm.p) / (2 * d)).epsilon(1e-5));
        CHECK(m.qp == doctest::Approx(angle_diff(pp.q, pm.q) / (2 * d)).epsilon(1e-5));
    }
}

TEST_CASE("strobe map: sensitive dependence in the chaotic sea") {
    SystemParams par = SystemParams::symmetric(0.72);
    StrobeMap map(par);
    PhaseSpacePoint a{0.0, kPi - 0.5};
    PhaseSpacePoint b{1e-12, kPi - 0.5};
    double sep = 0.0;
    int it = 0;
    for (; it < 80 && sep < 0.1; ++it) {
        a = map.apply(a);
        b = map.apply(b);
        sep = phase_space_distance(a, b);
    }
    CHECK(sep > 0.1);
    CHECK(it < 80);
}

TEST_CASE("orbit started at the island center stays inside the island box") {
    SystemParams par = SystemParams::symmetric(0.72);
    IslandData island = island_center_and_frequency(par, 1.0);
    StrobeMap map(par);
    PhaseSpacePoint x{island.center.p + 0.05, island.center.q};
    for (int k = 0; k < 1000; ++k) {
        x = map.apply(x);
        CHECK(std::abs(x.p - island.center.p) < 0.8);
        CHECK(std::abs(angle_diff(x.q, island.center.q)) < 1.6);
    }
}

TEST_CASE("poincare_section: classification basics") {
    SystemParams free = SystemParams::symmetric(0.0);
    auto orbits = poincare_section(free, {{0.37, 0.1}, {1.91, -2.0}}, 50);
    for (const auto& o : orbits) {
        CHECK(o.classification == OrbitClass::Regular);
        for (const auto& pt : o.points) CHECK(pt.p == doctest::Approx(o.seed.p));
    }

    SystemParams par = SystemParams::symmetric(0.72);
    auto island = classify_orbit(par, {1.20, 0.0}, 300);
    CHECK(island.classification == OrbitClass::Regular);
    auto sea = classify_orbit(par, {0.0, kPi - 0.5}, 2000);
    CHECK(sea.classification == OrbitClass::Chaotic);
}

TEST_CASE("find_periodic_orbit: free rotor is degenerate") {
    SystemParams par = SystemParams::symmetric(0.0);
    // off the p=1 line the Newton Jacobian is singular (pure shear)
    CHECK_THROWS_AS(find_periodic_orbit(par, {1.003, 0.3}, 1), SingularJacobian);
    // exactly on it, every q is fixed and the orbit is parabolic
    PeriodicOrbit po = find_periodic_orbit(par, {1.0, 0.3}, 1);
    CHECK(po.trace == doctest::Approx(2.0));
}

TEST_CASE("find_periodic_orbit: small-gamma island center trace") {
    SystemParams par = SystemParams::symmetric(0.1);
    PeriodicOrbit po = find_periodic_orbit(par, {1.0, 0.0}, 1);
    CHECK(po.stable());
    CHECK(po.residual < 1e-10);
    // pendulum limit: trace = 2 cos(2 pi sqrt(gamma/2))
    double expected = 2.0 * std::cos(kTau * std::sqrt(0.05));
    CHECK(std::abs(po.trace - expected) < 0.05);
    CHECK(po.winding == 1);
}

TEST_CASE("island centers: location, frequency, and mirror symmetry") {
    SystemParams par = SystemParams::symmetric(0.72);
    IslandData up = island_center_and_frequency(par, 1.0);
    CHECK(std::abs(up.center.p - 1.20) < 0.05);
    CHECK(std::abs(up.center.q) < 1e-8);
    CHECK(std::abs(up.omega0 - 0.4) < 0.05);

    IslandData down = island_center_and_frequency(par, -1.0);
    CHECK(std::abs(down.center.p + up.center.p) < 1e-8);
    CHECK(std::abs(angle_diff(down.center.q, -up.center.q)) < 1e-8);
    CHECK(down.omega0 == doctest::Approx(up.omega0).epsilon(1e-8));

    SystemParams small = SystemParams::symmetric(0.1);
    IslandData s = island_center_and_frequency(small, 1.0);
    CHECK(std::abs(s.omega0 - std::sqrt(0.05)) / std::sqrt(0.05) < 0.02);

    CHECK_THROWS_AS(island_center_and_frequency(SystemParams::symmetric(0.0), 1.0),
                    NumericalError);
}

TEST_CASE("calibrate_strobe_steps honours its stopping rule") {
    SystemParams par = SystemParams::symmetric(0.72);
    PhaseSpacePoint probe{1.1, 0.2};
    int steps = calibrate_strobe_steps(par, probe, 1e-11);
    auto at = StrobeMap(par, steps).apply(probe);
    auto at2 = StrobeMap(par, 2 * steps).apply(probe);
    CHECK(phase_space_distance(at, at2) < 1e-11);
    // a looser tolerance never needs more steps
    CHECK(calibrate_strobe_steps(par, probe, 1e-8) <= steps);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fpend/classical.hpp"
#include "fpend/resonance.hpp"
#include "fpend/separatrix.hpp"

using namespace fpend;

namespace {

// Plain pendulum H = (p - i0)^2 / (2 m0) + 2 v0 cos(ell q): the analytic
// benchmark for the separatrix machinery. Time-T flow via the same
// kick-drift-kick composition as the production integrator.
struct SyntheticPendulum {
    double i0 = 1.2, m0 = 1.0, v0 = 1e-3;
    int ell = 7;

    void leapfrog(double& p, double& q, double h) const {
        p += 0.5 * h * force(q);
        q += h * (p - i0) / m0;
        p += 0.5 * h * force(q);
    }
    double force(double q) const { return 2.0 * v0 * ell * std::sin(ell * q); }
    double force_q(double q) const { return 2.0 * v0 * ell * ell * std::cos(ell * q); }

    PhaseSpacePoint flow(PhaseSpacePoint x, double time, int steps) const {
        constexpr double w1 = 1.0 / (2.0 - 1.2599210498948731);
        constexpr double w0 = 1.0 - 2.0 * w1;
        double h = time / steps;
        for (int i = 0; i < steps; ++i) {
            leapfrog(x.p, x.q, w1 * h);
            leapfrog(x.p, x.q, w0 * h);
            leapfrog(x.p, x.q, w1 * h);
        }
        return x.wrapped();
    }

    std::pair<PhaseSpacePoint, Mat2> flow_tangent(PhaseSpacePoint x, double time,
                                                  int steps) const {
        constexpr double w1 = 1.0 / (2.0 - 1.2599210498948731);
        constexpr double w0 = 1.0 - 2.0 * w1;
        double h = time / steps;
        Mat2 m = Mat2::identity();
        auto sub = [&](double hh) {
            double f0 = force_q(x.q);
            leapfrog(x.p, x.q, hh);
            double f1 = force_q(x.q);
            Mat2 k0{1.0, 0.5 * hh * f0, 0.0, 1.0};
            Mat2 d{1.0, 0.0, hh / m0, 1.0};
            Mat2 k1{1.0, 0.5 * hh * f1, 0.0, 1.0};
            m = k1 * (d * (k0 * m));
        };
        for (int i = 0; i < steps; ++i) {
            sub(w1 * h);
            sub(w0 * h);
            sub(w1 * h);
        }
        return {x.wrapped(), m};
    }
};

}  // namespace

TEST_CASE("synthetic pendulum: separatrix areas match the analytic value to 1%") {
    SyntheticPendulum sys;
    const double period = sys.ell * kTau;  // one map application
    const int steps = 4096;

    MapSystem map;
    map.map = [&](const PhaseSpacePoint& x) { return sys.flow(x, period, steps); };
    map.map_tangent = [&](const PhaseSpacePoint& x) {
        return sys.flow_tangent(x, period, steps);
    };
    map.arc_symmetry = [&](const PhaseSpacePoint& x) {
        return PhaseSpacePoint{x.p, wrap_angle(x.q + kTau / sys.ell)};
    };

    std::vector<PhaseSpacePoint> chain;  // hyperbolic points at cos(ell q) = 1
    for (int j = 0; j < sys.ell; ++j)
        chain.push_back({sys.i0, wrap_angle(kTau * j / sys.ell)});

    SeparatrixOptions opt;
    opt.cylinder_band = true;
    // the ell*tau flow expands by e^{13.8} per application here, so the arc
    // needs a dense seed segment to keep polygon chords short
    opt.seeds_per_segment = 160;
    SeparatrixAreas areas =
        trace_separatrix_areas(map, chain, {sys.i0, 0.0}, opt);

    const double ds_expected = 16.0 * std::sqrt(2.0 * sys.m0 * sys.v0);
    CHECK(areas.outer > areas.inner);
    CHECK(std::abs((areas.outer - areas.inner) - ds_expected) / ds_expected < 0.01);
    // outer and inner loops straddle the ring 2 pi I0 symmetrically
    CHECK(std::abs(areas.outer + areas.inner - 2.0 * kTau * sys.i0) /
              (2.0 * kTau * sys.i0) <
          0.01);
}

TEST_CASE("synthetic pendulum: monodromy trace and parameter round trip") {
    SyntheticPendulum sys;
    const double period = sys.ell * kTau;
    // stable cell center at cos(ell q) = -1
    auto [img, m] = sys.flow_tangent({sys.i0, kPi / sys.ell}, period, 8192);
    CHECK(phase_space_distance(img, {sys.i0, kPi / sys.ell}) < 1e-10);

    double omega_res = sys.ell * std::sqrt(2.0 * sys.v0 / sys.m0);
    double expected_trace = 2.0 * std::cos(omega_res * period);
    CHECK(std::abs(m.trace() - expected_trace) < 5e-4);

    // invert exact pendulum inputs: the measured-frequency hint selects the
    // 2-pi branch (omega_res * ell * tau = 13.77 here, i.e. k = 2)
    double ds = 16.0 * std::sqrt(2.0 * sys.m0 * sys.v0);
    double s_outer = kTau * sys.i0 + 0.5 * ds;
    double s_inner = kTau * sys.i0 - 0.5 * ds;
    ResonanceData rec = resonance_parameters(s_outer, s_inner, expected_trace, sys.ell,
                                             omega_res * 1.001);
    CHECK(rec.coupling == doctest::Approx(sys.v0).epsilon(1e-10));
    CHECK(rec.effective_mass == doctest::Approx(sys.m0).epsilon(1e-10));
    CHECK(rec.action_center == doctest::Approx(sys.i0).epsilon(1e-12));
    CHECK(rec.omega_res == doctest::Approx(omega_res).epsilon(1e-10));
}

TEST_CASE("resonance_parameters: scaling and domain errors") {
    ResonanceData base = resonance_parameters(2.0, 1.5, 0.5, 7, 0.02);
    ResonanceData doubled = resonance_parameters(4.0, 3.0, 0.5, 7, 0.02);
    CHECK(doubled.action_center == doctest::Approx(2.0 * base.action_center));
    // doubling both areas doubles dS: m0 V0 scales by 4 at fixed trace
    CHECK(doubled.effective_mass * doubled.coupling ==
          doctest::Approx(4.0 * base.effective_mass * base.coupling).epsilon(1e-12));

    CHECK_THROWS_AS(resonance_parameters(1.0, 1.5, 0.5, 7, 0.02), std::invalid_argument);
    CHECK_THROWS_AS(resonance_parameters(2.0, 1.5, 2.5, 7, 0.02), std::domain_error);
}

TEST_CASE("rotation_profile: harmonic limit, resonance crossing, trend") {
    SystemParams par = SystemParams::symmetric(0.72, 1.0 / 16.0);
    IslandData island = island_center_and_frequency(par, 1.0);
    auto profile = rotation_profile(par, island, 40, 0.75, 400);
    REQUIRE(profile.size() > 20);

    // harmonic limit: innermost sample reproduces the monodromy frequency
    CHECK(std::abs(profile.front().omega - island.omega0) / island.omega0 < 0.02);

    // the folded rotation number crosses 3/7 inside the island
    double target = 3.0 / 7.0;
    bool crosses = false;
    for (size_t i = 1; i < profile.size(); ++i)
        if ((profile[i - 1].omega - target) * (profile[i].omega - target) <= 0.0)
            crosses = true;
    CHECK(crosses);

    // this island's rotation number rises with the action (the pendulum-like
    // decreasing trend shows up only in the unfolded branch)
    int increases = 0, total = 0;
    for (size_t i = 1; i < profile.size(); ++i) {
        total += 1;
        increases += profile[i].omega > profile[i - 1].omega;
    }
    CHECK(increases > 0.9 * total);
    // actions are monotone along the ray
    for (size_t i = 1; i < profile.size(); ++i)
        CHECK(profile[i].action > profile[i - 1].action);
}

TEST_CASE("find_resonance_chain: the 3:7 chain at gamma = 0.72") {
    SystemParams par = SystemParams::symmetric(0.72, 1.0 / 16.0);
    IslandData island = island_center_and_frequency(par, 1.0);
    ResonanceData res = find_resonance_chain(par, island, 3, 7);

    CHECK(res.s == 3);
    CHECK(res.ell == 7);
    CHECK(res.stable_orbit.stable());
    CHECK_FALSE(res.unstable_orbit.stable());
    CHECK(res.stable_orbit.winding == 3);
    CHECK(res.s_outer > res.s_inner);
    CHECK(res.coupling > 0.0);
    CHECK(res.effective_mass > 0.0);
    // chain sits mid-island (the rotation profile crosses 3/7 there)
    CHECK(res.action_center > 0.15);
    CHECK(res.action_center < 0.32);
    // pendulum consistency: the stable trace reproduces omega_res
    CHECK(std::abs(2.0 * std::cos(res.omega_res * res.ell * kTau) - res.trace_stable) <
          1e-6);
}

TEST_CASE("separatrix areas: the 3:7 chain is much more developed at 0.72 than 0.67") {
    SystemParams a = SystemParams::symmetric(0.72, 1.0 / 16.0);
    IslandData ia = island_center_and_frequency(a, 1.0);
    ResonanceData ra = find_resonance_chain(a, ia, 3, 7);

    SystemParams b = SystemParams::symmetric(0.67, 1.0 / 16.0);
    IslandData ib = island_center_and_frequency(b, 1.0);
    ResonanceData rb = find_resonance_chain(b, ib, 3, 7);

    CHECK((ra.s_outer - ra.s_inner) > (rb.s_outer - rb.s_inner));
    // the 0.67 chain sits much closer to the island center
    CHECK(rb.action_center < 0.6 * ra.action_center);
}

TEST_CASE("island_area: small-gamma pendulum limit") {
    SystemParams par = SystemParams::symmetric(0.1, 1.0 / 16.0);
    IslandData island = island_center_and_frequency(par, 1.0);
    IslandAreaOptions opt;
    opt.grid_p = 64;
    opt.grid_q = 64;
    opt.n_iter = 800;
    IslandData full = island_area(par, island, opt);
    double expected = 16.0 * std::sqrt(0.05);  // unbroken-resonance separatrix area
    CHECK(std::abs(full.area - expected) / expected < 0.15);
    CHECK(full.action == doctest::Approx(full.area / kTau));
}

TEST_CASE("island_area: benchmark couplings have areas of the same order") {
    IslandAreaOptions opt;
    opt.grid_p = 56;
    opt.grid_q = 56;
    opt.n_iter = 700;

    SystemParams a = SystemParams::symmetric(0.72, 1.0 / 16.0);
    IslandData fa = island_area(a, island_center_and_frequency(a, 1.0), opt);
    SystemParams b = SystemParams::symmetric(0.67, 1.0 / 16.0);
    IslandData fb = island_area(b, island_center_and_frequency(b, 1.0), opt);

    CHECK(fa.area > 0.0);
    CHECK(fb.area > 0.0);
    double ratio = fa.area / fb.area;
    CHECK(ratio > 0.7);
    CHECK(ratio < 1.3);

    // too-narrow momentum window: the island region hits the grid edge
    IslandAreaOptions narrow = opt;
    narrow.span_p = 0.25;
    CHECK_THROWS_AS(island_area(a, island_center_and_frequency(a, 1.0), narrow),
                    GridTooCoarse);
}

TEST_CASE("measure_libration_frequency matches the island frequency branch") {
    SystemParams par = SystemParams::symmetric(0.72, 1.0 / 16.0);
    IslandData island = island_center_and_frequency(par, 1.0);
    double rate = measure_libration_frequency(par, island.center, 300);
    CHECK(rate == doctest::Approx(island.omega0_raw).epsilon(1e-3));
    CHECK(island.omega0_raw == doctest::Approx(1.0 - island.omega0).epsilon(1e-3));
}

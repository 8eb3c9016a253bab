#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <complex>
#include <random>

#include "fpend/classical.hpp"
#include "fpend/floquet.hpp"
#include "fpend/phase_space.hpp"

using namespace fpend;
using cd = std::complex<double>;

namespace {
std::mt19937 rng(424242u);
double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct Workspace {
    SystemParams par = SystemParams::symmetric(0.72, 1.0 / 16.0);
    MomentumBasis basis = make_basis(1.0 / 16.0);
    FloquetSpectrum sp;
    IslandData island;
    Workspace() {
        sp = diagonalize(build_propagator(par, basis, 512), par, basis, 512);
        island = island_center_and_frequency(par, 1.0);
    }
};

const Workspace& ws() {
    static Workspace w;
    return w;
}
}  // namespace

TEST_CASE("coherent_vector: normalization and peak location") {
    MomentumBasis basis(0.1, 60);
    CoherentState cs{0.1 * 17, 0.0, 0.1};
    CHECK(cs.width_p() == doctest::Approx(std::sqrt(0.05)));
    Eigen::VectorXcd z = coherent_vector(basis, cs);
    CHECK(std::abs(z.norm() - 1.0) < 1e-12);
    int peak = 0;
    z.cwiseAbs().maxCoeff(&peak);
    CHECK(basis.n_of(peak) == 17);

    CHECK_THROWS_AS(coherent_vector(basis, CoherentState{1.0, 0.0, 0.2}),
                    std::invalid_argument);
}

TEST_CASE("coherent_vector: translation covariance") {
    MomentumBasis basis(0.08, 70);
    for (int trial = 0; trial < 20; ++trial) {
        double p0 = uniform(-1.5, 1.5), q0 = uniform(-2.0, 2.0), dq = uniform(-1.0, 1.0);
        Eigen::VectorXcd a = coherent_vector(basis, {p0, q0, basis.hbar});
        Eigen::VectorXcd b = coherent_vector(basis, {p0, q0 + dq, basis.hbar});
        // b_n = a_n exp(-i n dq)
        double worst = 0.0;
        for (int i = 0; i < basis.dim(); ++i) {
            cd expect = a[i] * std::exp(cd(0.0, -basis.n_of(i) * dq));
            worst = std::max(worst, std::abs(b[i] - expect));
        }
        CHECK(worst < 1e-12);
        // overlap depends only on the centre offset
        Eigen::VectorXcd c = coherent_vector(basis, {p0, q0 - dq, basis.hbar});
        CHECK(std::abs(a.dot(b)) == doctest::Approx(std::abs(c.dot(a))).epsilon(1e-10));
    }
}

TEST_CASE("overlaps: completeness and doublet dominance on the island") {
    const auto& w = ws();
    CoherentState cs{w.island.center.p, w.island.center.q, w.par.hbar};
    auto sig = overlaps(w.sp, coherent_vector(w.basis, cs));
    double sum2 = 0.0;
    for (double s : sig) sum2 += s * s;
    CHECK(std::abs(sum2 - 1.0) < 1e-10);

    auto sorted = sig;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    // exactly two near-equal overlaps dominate the rest
    CHECK(sorted[0] > 0.6);
    CHECK(sorted[1] > 0.6);
    CHECK(std::abs(sorted[0] - sorted[1]) < 0.05 * sorted[0]);
    CHECK(sorted[2] < 0.3 * sorted[1]);

    // threshold filters: "few" at 7e-3, "more" at 1.4e-3
    int c7 = 0, c14 = 0;
    for (double s : sig) {
        if (s >= 7e-3) ++c7;
        if (s >= 1.4e-3) ++c14;
    }
    CHECK(c7 >= 4);
    CHECK(c7 <= 40);
    CHECK(c14 > c7);
    CHECK(c14 < w.basis.dim() / 2);
}

TEST_CASE("select_doublet: splittings at the two benchmark couplings") {
    const auto& w = ws();
    CoherentState cs{w.island.center.p, w.island.center.q, w.par.hbar};
    DoubletRecord d = select_doublet(w.sp, coherent_vector(w.basis, cs));
    CHECK(d.delta >= 1e-7);
    CHECK(d.delta <= 1e-5);
    CHECK_FALSE(d.ambiguous);
    CHECK(d.sigma_plus > 0.6);
    CHECK(d.sigma_minus > 0.6);

    SystemParams par67 = SystemParams::symmetric(0.67, 1.0 / 16.0);
    MomentumBasis b67 = make_basis(par67.hbar);
    auto sp67 = diagonalize(build_propagator(par67, b67, 512), par67, b67, 512);
    IslandData island67 = island_center_and_frequency(par67, 1.0);
    DoubletRecord d67 =
        select_doublet(sp67, coherent_vector(b67, {island67.center.p, 0.0, par67.hbar}));
    CHECK(d67.delta >= 1e-12);
    CHECK(d67.delta <= 1e-10);
    CHECK(d.delta / d67.delta >= 1e4);
}

TEST_CASE("select_doublet: free case is exactly degenerate") {
    SystemParams par = SystemParams::symmetric(0.0, 0.2);
    MomentumBasis basis = make_basis(0.2);
    auto sp = diagonalize(build_propagator(par, basis, 512), par, basis, 512);
    DoubletRecord d = select_doublet(sp, coherent_vector(basis, {1.0, 0.0, 0.2}));
    CHECK(d.delta < 1e-12);
}

TEST_CASE("symmetry_conjugate: involution and island reflection") {
    MomentumBasis basis(0.1, 40);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXcd v(basis.dim());
        for (int i = 0; i < basis.dim(); ++i) v[i] = cd(uniform(-1, 1), uniform(-1, 1));
        v.normalize();
        Eigen::VectorXcd twice = symmetry_conjugate(symmetry_conjugate(v, basis), basis);
        CHECK((twice - v).norm() < 1e-14);
    }
    Eigen::VectorXcd up = coherent_vector(basis, {1.1, 0.4, 0.1});
    Eigen::VectorXcd lo = coherent_vector(basis, {-1.1, 0.4, 0.1});
    CHECK((symmetry_conjugate(up, basis) - lo).norm() < 1e-13);
}

TEST_CASE("parity_label: symmetric and antisymmetric combinations") {
    const auto& w = ws();
    CoherentState cs{w.island.center.p, 0.0, w.par.hbar};
    Eigen::VectorXcd zp = coherent_vector(w.basis, cs);
    Eigen::VectorXcd zm = symmetry_conjugate(zp, w.basis);
    Eigen::VectorXcd even = (zp + zm).normalized();
    Eigen::VectorXcd odd = (zp - zm).normalized();
    CHECK(parity_label(even, w.basis, cs) == +1);
    CHECK(parity_label(odd, w.basis, cs) == -1);

    DoubletRecord d = select_doublet(w.sp, zp);
    int lp = parity_label(w.sp.vectors.col(d.index_plus), w.basis, cs);
    int lm = parity_label(w.sp.vectors.col(d.index_minus), w.basis, cs);
    CHECK(lp == +1);
    CHECK(lm == -1);
    CHECK(lp == w.sp.parity[d.index_plus]);
    CHECK(lm == w.sp.parity[d.index_minus]);

    // a state with no island weight cannot be labelled
    Eigen::VectorXcd far = Eigen::VectorXcd::Zero(w.basis.dim());
    far[w.basis.index_of(w.basis.n_max)] = 1.0;
    CHECK_THROWS_AS(parity_label(far, w.basis, cs), IndeterminateLabel);
}

TEST_CASE("husimi: momentum eigenstate is a ridge, coherent state a unit peak") {
    MomentumBasis basis(0.1, 40);
    Eigen::VectorXcd mom = Eigen::VectorXcd::Zero(basis.dim());
    int n_sel = 7;
    mom[basis.index_of(n_sel)] = 1.0;
    HusimiGrid grid;
    grid.p_min = -1.5;
    grid.p_max = 1.5;
    grid.np = 31;
    grid.nq = 21;
    HusimiField field = husimi(mom, basis, grid);
    // ridge: uniform in q at fixed p, maximal on the p = hbar n line
    int ridge_row = 0;
    double best = -1.0;
    for (int i = 0; i < grid.np; ++i) {
        double row_min = field.intensity.row(i).minCoeff();
        double row_max = field.intensity.row(i).maxCoeff();
        CHECK(row_max - row_min < 1e-12);
        if (row_max > best) {
            best = row_max;
            ridge_row = i;
        }
    }
    CHECK(field.p_values[ridge_row] == doctest::Approx(0.1 * n_sel).epsilon(0.05));

    CoherentState cs{0.4, 1.0, 0.1};
    Eigen::VectorXcd z = coherent_vector(basis, cs);
    HusimiGrid g2;
    g2.p_min = 0.4 - 1.0;
    g2.p_max = 0.4 + 1.0;
    g2.q_min = 0.0;
    g2.q_max = 2.0;
    g2.np = 41;
    g2.nq = 41;
    HusimiField f2 = husimi(z, basis, g2);
    Eigen::Index bi, bj;
    f2.intensity.maxCoeff(&bi, &bj);
    CHECK(f2.p_values[bi] == doctest::Approx(0.4).epsilon(0.08));
    CHECK(f2.q_values[bj] == doctest::Approx(1.0).epsilon(0.08));
    CHECK(f2.intensity(bi, bj) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(f2.intensity.maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("husimi: Janus state localizes at the island-chaos borderline") {
    SystemParams par = SystemParams::symmetric(0.72, 1.0 / 30.0);
    MomentumBasis basis = make_basis(par.hbar);
    auto sp = diagonalize(build_propagator(par, basis, 512), par, basis, 512);
    IslandData island = island_center_and_frequency(par, 1.0);

    const double target = -0.007774;
    int best = 0;
    double bd = 1.0;
    for (int i = 0; i < sp.dim(); ++i) {
        double d = circle_distance(sp.quasienergies[i], target, par.hbar);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    CHECK(bd < 2e-5);

    CoherentState cs{island.center.p, 0.0, par.hbar};
    auto sig = overlaps(sp, coherent_vector(basis, cs));
    CHECK(sig[best] > 1e-5);   // coupled to the island edge...
    CHECK(sig[best] < 0.05);   // ...but no core state

    auto scaled_radius = [&](const Eigen::VectorXcd& state) {
        HusimiGrid grid;
        grid.p_min = 0.0;
        grid.p_max = 2.4;
        grid.np = 48;
        grid.nq = 48;
        HusimiField f = husimi(state, basis, grid);
        double wsum = 0.0, rsum = 0.0;
        for (int i = 0; i < grid.np; ++i)
            for (int j = 0; j < grid.nq; ++j) {
                double w = f.intensity(i, j);
                double dp = f.p_values[i] - island.center.p;
                double dq = angle_diff(f.q_values[j], 0.0);
                wsum += w;
                rsum += w * std::sqrt(dp * dp + 0.2 * dq * dq);
            }
        return rsum / wsum;
    };

    DoubletRecord d = select_doublet(sp, coherent_vector(basis, cs));
    double r_janus = scaled_radius(sp.vectors.col(best));
    double r_core = scaled_radius(sp.vectors.col(d.index_plus));
    CHECK(r_core < 0.35);
    CHECK(r_janus > 0.5);
    CHECK(r_janus < 1.2);
}

TEST_CASE("harmonic_index: exact and synthetic lattices") {
    double hbar = 1.0 / 16.0, omega0 = 0.4;
    auto h0 = harmonic_index(0.01, 0.01, omega0, hbar);
    CHECK(h0.l == 0);
    CHECK(h0.residual < 1e-15);

    for (int l_true = 0; l_true <= 12; ++l_true) {
        double cand = canonical_quasienergy(0.004 + l_true * hbar * omega0, hbar);
        auto h = harmonic_index(0.004, cand, omega0, hbar);
        // aliasing on the circle can map a high rung onto a lower one; the
        // match must reproduce the candidate position exactly either way
        CHECK(h.residual < 1e-12);
        double eq = canonical_quasienergy(0.004 + h.l * hbar * omega0, hbar);
        CHECK(circle_distance(eq, cand, hbar) < 1e-12);
    }
}

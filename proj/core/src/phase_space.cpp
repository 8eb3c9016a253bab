#include "fpend/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fpend/errors.hpp"

namespace fpend {

using cd = std::complex<double>;

Eigen::VectorXcd coherent_vector(const MomentumBasis& basis, const CoherentState& cs) {
    if (cs.hbar != basis.hbar)
        throw std::invalid_argument("coherent_vector: probe hbar must match the basis");
    const int n = basis.dim();
    Eigen::VectorXcd v(n);
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double pn = basis.momentum(i);
        double g = std::exp(-(pn - cs.p0) * (pn - cs.p0) / (2.0 * basis.hbar));
        norm2 += g * g;
        double phase = -basis.n_of(i) * cs.q0;
        v[i] = g * cd(std::cos(phase), std::sin(phase));
    }
    v /= std::sqrt(norm2);
    return v;
}

std::vector<double> overlaps(const FloquetSpectrum& spectrum, const Eigen::VectorXcd& probe) {
    if (probe.size() != spectrum.vectors.rows())
        throw std::invalid_argument("overlaps: probe dimension mismatch");
    Eigen::VectorXcd amps = spectrum.vectors.adjoint() * probe;
    std::vector<double> sigma(amps.size());
    for (int i = 0; i < amps.size(); ++i) sigma[i] = std::abs(amps[i]);
    return sigma;
}

DoubletRecord select_doublet(const FloquetSpectrum& spectrum, const Eigen::VectorXcd& probe) {
    std::vector<double> sigma = overlaps(spectrum, probe);
    const int n = static_cast<int>(sigma.size());
    if (n < 3) throw std::invalid_argument("select_doublet: spectrum too small");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + 3, order.end(),
                      [&](int a, int b) { return sigma[a] > sigma[b]; });

    int a = order[0], b = order[1], c = order[2];
    DoubletRecord rec;
    rec.ambiguous = (sigma[b] > 0.0) && ((sigma[b] - sigma[c]) < 0.1 * sigma[b]);

    // label by parity sector when available, else by overlap rank
    bool a_plus = spectrum.parity.empty() ? true : (spectrum.parity[a] >= spectrum.parity[b]);
    int ip = a_plus ? a : b;
    int im = a_plus ? b : a;
    rec.index_plus = ip;
    rec.index_minus = im;
    rec.eps_plus = spectrum.quasienergies[ip];
    rec.eps_minus = spectrum.quasienergies[im];
    rec.sigma_plus = sigma[ip];
    rec.sigma_minus = sigma[im];
    rec.delta = circle_distance(rec.eps_plus, rec.eps_minus, spectrum.hbar);
    return rec;
}

Eigen::VectorXcd symmetry_conjugate(const Eigen::VectorXcd& state, const MomentumBasis& basis) {
    if (state.size() != basis.dim())
        throw std::invalid_argument("symmetry_conjugate: dimension mismatch");
    Eigen::VectorXcd out(state.size());
    for (int i = 0; i < state.size(); ++i)
        out[basis.index_of(-basis.n_of(i))] = std::conj(state[i]);
    return out;
}

int parity_label(const Eigen::VectorXcd& state, const MomentumBasis& basis,
                 const CoherentState& cs_upper) {
    Eigen::VectorXcd z_up = coherent_vector(basis, cs_upper);
    Eigen::VectorXcd z_lo = symmetry_conjugate(z_up, basis);
    cd a = z_up.dot(state);  // <z_up|state>
    cd b = z_lo.dot(state);
    if (std::abs(a) < 1e-12 || std::abs(b) < 1e-12)
        throw IndeterminateLabel("parity_label: state has no weight on an island");
    // the relative sign is invariant under the state's global phase
    double w = std::real(a * std::conj(b));
    return (w >= 0.0) ? +1 : -1;
}

HusimiField husimi(const Eigen::VectorXcd& state, const MomentumBasis& basis,
                   const HusimiGrid& grid) {
    if (state.size() != basis.dim())
        throw std::invalid_argument("husimi: dimension mismatch");
    HusimiField field;
    field.grid = grid;
    field.p_values.resize(grid.np);
    field.q_values.resize(grid.nq);
    field.intensity.resize(grid.np, grid.nq);

    const int n = basis.dim();
    for (int i = 0; i < grid.np; ++i)
        field.p_values[i] =
            grid.p_min + (grid.p_max - grid.p_min) * (grid.np > 1 ? i / (grid.np - 1.0) : 0.5);
    for (int j = 0; j < grid.nq; ++j)
        field.q_values[j] =
            grid.q_min + (grid.q_max - grid.q_min) * (grid.nq > 1 ? j / (grid.nq - 1.0) : 0.5);

    std::vector<double> g(n);
    std::vector<cd> weighted(n);
    for (int i = 0; i < grid.np; ++i) {
        double p0 = field.p_values[i];
        double norm2 = 0.0;
        for (int k = 0; k < n; ++k) {
            double pn = basis.momentum(k);
            g[k] = std::exp(-(pn - p0) * (pn - p0) / (2.0 * basis.hbar));
            norm2 += g[k] * g[k];
            weighted[k] = g[k] * state[k];
        }
        double inv_norm2 = 1.0 / norm2;
        for (int j = 0; j < grid.nq; ++j) {
            double q0 = field.q_values[j];
            // <z|psi> = sum_n g_n psi_n exp(+i n q0) / sqrt(norm)
            cd acc(0.0, 0.0);
            for (int k = 0; k < n; ++k) {
                double phase = basis.n_of(k) * q0;
                acc += weighted[k] * cd(std::cos(phase), std::sin(phase));
            }
            field.intensity(i, j) = std::norm(acc) * inv_norm2;
        }
    }
    return field;
}

HarmonicIndex harmonic_index(double eps0, double eps_candidate, double omega0, double hbar,
                             int l_max) {
    HarmonicIndex best;
    best.residual = std::numeric_limits<double>::infinity();
    for (int l = 0; l <= l_max; ++l) {
        double target = canonical_quasienergy(eps0 + l * hbar * omega0, hbar);
        double r = circle_distance(eps_candidate, target, hbar);
        if (r < best.residual) {
            best.residual = r;
            best.l = l;
        }
    }
    return best;
}

AuditReport convergence_audit(const SystemParams& par, const MomentumBasis& basis,
                              const PhaseSpacePoint& probe_center, int steps_per_period) {
    auto probe_delta = [&](const MomentumBasis& b, int steps) {
        Eigen::MatrixXcd u = build_propagator(par, b, steps);
        FloquetSpectrum sp = diagonalize(u, par, b, steps);
        CoherentState cs{probe_center.p, probe_center.q, b.hbar};
        return select_doublet(sp, coherent_vector(b, cs)).delta;
    };

    AuditReport rep;
    rep.n_max_refined = static_cast<int>(std::ceil(basis.n_max * 1.25));
    rep.steps_refined = 2 * steps_per_period;
    rep.delta_base = probe_delta(basis, steps_per_period);
    rep.delta_refined = probe_delta(MomentumBasis(basis.hbar, rep.n_max_refined),
                                    rep.steps_refined);
    // splittings below the quasienergy resolution floor count as identical
    double floor = 1e-12 * basis.hbar;
    double scale = std::max(0.5 * (std::abs(rep.delta_base) + std::abs(rep.delta_refined)),
                            floor);
    rep.drift = std::abs(rep.delta_refined - rep.delta_base) / scale;
    rep.certified = rep.drift < 0.05;
    return rep;
}

}  // namespace fpend

#include "fpend/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "fpend/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fpend {

void SweepConfig::validate() const {
    if (gamma < 0.0) throw std::invalid_argument("SweepConfig: gamma must be >= 0");
    if (points < 1) throw std::invalid_argument("SweepConfig: need at least one grid point");
    if (points > 1 && !(inv_hbar_max > inv_hbar_min))
        throw std::invalid_argument("SweepConfig: grid must be strictly increasing");
    if (inv_hbar_min <= 0.0) throw std::invalid_argument("SweepConfig: 1/hbar must be > 0");
    if (!(sigma_filter > 0.0 && sigma_filter < 1.0))
        throw std::invalid_argument("SweepConfig: sigma_filter must lie in (0, 1)");
    if (p_bound <= 0.0) throw std::invalid_argument("SweepConfig: p_bound must be > 0");
}

namespace {

double doublet_mean(const DoubletRecord& d, double hbar) {
    return canonical_quasienergy(d.eps_plus + 0.5 * std::remainder(d.eps_minus - d.eps_plus,
                                                                   hbar),
                                 hbar);
}

SplittingRecord run_point(const SweepConfig& cfg, double inv_hbar,
                          const PhaseSpacePoint& probe) {
    SplittingRecord rec;
    rec.inv_hbar = inv_hbar;
    rec.steps = cfg.steps_per_period;
    try {
        SystemParams par = SystemParams::symmetric(cfg.gamma, 1.0 / inv_hbar);
        MomentumBasis basis = make_basis(par.hbar, cfg.p_bound);
        rec.n_max = basis.n_max;

        Eigen::MatrixXcd u = build_propagator(par, basis, cfg.steps_per_period);
        FloquetSpectrum sp = diagonalize(u, par, basis, cfg.steps_per_period);
        Eigen::VectorXcd z = coherent_vector(basis, {probe.p, probe.q, par.hbar});
        DoubletRecord d = select_doublet(sp, z);

        rec.delta = d.delta;
        rec.eps_plus = d.eps_plus;
        rec.eps_minus = d.eps_minus;
        rec.sigma_plus = d.sigma_plus;
        rec.sigma_minus = d.sigma_minus;
        rec.ambiguous = d.ambiguous;

        if (cfg.with_levels) {
            std::vector<double> sigma = overlaps(sp, z);
            double mean = doublet_mean(d, par.hbar);
            for (int i = 0; i < sp.dim(); ++i) {
                if (sigma[i] < cfg.sigma_filter) continue;
                LevelEntry entry;
                entry.rel_quasienergy =
                    canonical_quasienergy(sp.quasienergies[i] - mean, par.hbar);
                entry.sigma = sigma[i];
                entry.parity = sp.parity[i];
                rec.levels.push_back(entry);
            }
            rec.retained_count = static_cast<int>(rec.levels.size());
        }

        if (cfg.audit) {
            MomentumBasis refined(par.hbar,
                                  static_cast<int>(std::ceil(basis.n_max * 1.25)));
            int steps2 = 2 * cfg.steps_per_period;
            Eigen::MatrixXcd u2 = build_propagator(par, refined, steps2);
            FloquetSpectrum sp2 = diagonalize(u2, par, refined, steps2);
            Eigen::VectorXcd z2 = coherent_vector(refined, {probe.p, probe.q, par.hbar});
            double delta2 = select_doublet(sp2, z2).delta;
            double floor = 1e-12 * par.hbar;
            double scale = std::max(0.5 * (rec.delta + delta2), floor);
            rec.audit_drift = std::abs(delta2 - rec.delta) / scale;
            rec.audited = true;
            rec.certified = rec.audit_drift < 0.05;
        }
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

}  // namespace

SweepResult splitting_sweep(const SweepConfig& config) {
    config.validate();
    SweepResult result;
    result.config = config;

#ifdef _OPENMP
    if (config.threads > 0) omp_set_num_threads(config.threads);
#endif

    if (config.probe_center) {
        result.probe = *config.probe_center;
    } else if (config.gamma > 0.0) {
        SystemParams par = SystemParams::symmetric(config.gamma);
        IslandData island = island_center_and_frequency(par, 1.0);
        result.probe = island.center;
        result.omega0 = island.omega0;
        result.omega0_raw = island.omega0_raw;
    } else {
        result.probe = {1.0, 0.0};  // free limit: probe the p = 1 ridge
    }

    result.records.resize(config.points);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (int i = 0; i < config.points; ++i)
        result.records[i] = run_point(config, config.inv_hbar_at(i), result.probe);
    return result;
}

SweepResult level_dynamics(const SweepConfig& config) {
    SweepConfig cfg = config;
    cfg.with_levels = true;
    return splitting_sweep(cfg);
}

std::vector<RatCurveRow> rat_overlay(const SweepResult& sweep,
                                     const std::vector<ResonanceData>& resonances,
                                     double chaos_border_action, double island_area) {
    if (resonances.empty())
        throw std::invalid_argument("rat_overlay: need at least one resonance");

    // dominant single-step chain: the largest pendulum matrix element
    const ResonanceData* dominant = &resonances.front();
    for (const auto& r : resonances)
        if (r.coupling > dominant->coupling) dominant = &r;

    // two-step pair: the inner chain feeds the outer one
    const ResonanceData* inner = nullptr;
    const ResonanceData* outer = nullptr;
    if (resonances.size() >= 2) {
        inner = &resonances.front();
        outer = &resonances.back();
        if (inner->action_center > outer->action_center) std::swap(inner, outer);
    }

    std::vector<RatCurveRow> rows;
    rows.reserve(sweep.records.size());
    for (const auto& rec : sweep.records) {
        RatCurveRow row;
        row.inv_hbar = rec.inv_hbar;
        row.quantum_ok = rec.ok();
        row.delta_quantum = rec.delta;
        row.certified = rec.certified;
        row.ambiguous = rec.ambiguous;
        double hbar = 1.0 / rec.inv_hbar;
        try {
            bool two_step = inner && rec.inv_hbar > two_step_boundary_inv_hbar(*inner, *outer);
            if (two_step) {
                row.mechanism = "two_step:" + std::to_string(inner->s) + "/" +
                                std::to_string(inner->ell) + "+" + std::to_string(outer->s) +
                                "/" + std::to_string(outer->ell);
                row.v_eff = effective_coupling_two_step(*inner, *outer, hbar);
                row.k_c = 2;
            } else {
                row.mechanism = "single:" + std::to_string(dominant->s) + "/" +
                                std::to_string(dominant->ell);
                row.v_eff = effective_coupling(*dominant, chaos_border_action, hbar);
                row.k_c = chain_length(*dominant, chaos_border_action, hbar);
            }
            SplittingScale scale = mean_splitting(row.v_eff, hbar);
            row.mean = scale.mean;
            row.band_lo = scale.band_lo;
            row.band_hi = scale.band_hi;
        } catch (const PoleAtDegeneracy&) {
            row.v_eff = std::numeric_limits<double>::infinity();
            row.mean = row.band_lo = row.band_hi = std::numeric_limits<double>::infinity();
            row.error = "pole";
        } catch (const NumericalError& e) {
            row.error = e.what();
        }
        row.pn_estimate = pn_splitting_estimate(island_area, hbar).value;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace fpend

// fpend: batch front end for the driven-pendulum tunnelling toolkit.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "fpend/classical.hpp"
#include "fpend/errors.hpp"
#include "fpend/floquet.hpp"
#include "fpend/io.hpp"
#include "fpend/phase_space.hpp"
#include "fpend/rat.hpp"
#include "fpend/resonance.hpp"
#include "fpend/separatrix.hpp"
#include "fpend/sweep.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#ifndef FPEND_VERSION
#define FPEND_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace fpend;

namespace {

struct CommonOpts {
    double gamma = 0.72;
    double p_bound = 4.0;
    int steps = kDefaultPropagatorSteps;
    std::string out = "out";
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--gamma", c.gamma, "coupling strength (gamma_+ = gamma_-)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--p-bound", c.p_bound, "momentum cutoff for basis and escape tests")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--steps", c.steps, "propagator time steps per period")
        ->capture_default_str();
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
    cmd->add_option("--threads", c.threads, "worker thread cap (0 = default)")
        ->capture_default_str();
}

fs::path prepare_out(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

struct RangeSpec {
    double min = 5.0, max = 45.0;
    int count = 200;
};

RangeSpec parse_range(const std::string& text) {
    RangeSpec r;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &r.min, &r.max, &r.count) != 3)
        throw CLI::ValidationError("--inv-hbar-range", "expected min:max:count");
    return r;
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif
    (void)threads;
}

nlohmann::json resonance_to_json(const ResonanceData& res) {
    nlohmann::json j;
    j["s"] = res.s;
    j["ell"] = res.ell;
    j["s_outer"] = res.s_outer;
    j["s_inner"] = res.s_inner;
    j["action_center"] = res.action_center;
    j["effective_mass"] = res.effective_mass;
    j["coupling"] = res.coupling;
    j["trace_stable"] = res.trace_stable;
    j["omega_res"] = res.omega_res;
    j["stable_anchor"] = {res.stable_orbit.anchor.p, res.stable_orbit.anchor.q};
    j["unstable_anchor"] = {res.unstable_orbit.anchor.p, res.unstable_orbit.anchor.q};
    j["unstable_trace"] = res.unstable_orbit.trace;
    return j;
}

ResonanceData resonance_from_json(const nlohmann::json& j) {
    ResonanceData res;
    res.s = j.at("s");
    res.ell = j.at("ell");
    res.s_outer = j.at("s_outer");
    res.s_inner = j.at("s_inner");
    res.action_center = j.at("action_center");
    res.effective_mass = j.at("effective_mass");
    res.coupling = j.at("coupling");
    res.trace_stable = j.at("trace_stable");
    res.omega_res = j.at("omega_res");
    return res;
}

int run_poincare(const CommonOpts& c, const std::string& seed_line,
                 const std::vector<std::string>& extra_seeds, int n_iter,
                 const std::string& config_echo) {
    SystemParams par = SystemParams::symmetric(c.gamma);
    std::vector<PhaseSpacePoint> seeds;
    double p0, p1, q = 0.0;
    int count;
    if (std::sscanf(seed_line.c_str(), "%lf:%lf:%d:%lf", &p0, &p1, &count, &q) < 3)
        throw CLI::ValidationError("--seed-line", "expected pmin:pmax:count[:q]");
    for (int i = 0; i < count; ++i)
        seeds.push_back({count > 1 ? p0 + (p1 - p0) * i / (count - 1.0) : p0, q});
    for (const auto& s : extra_seeds) {
        PhaseSpacePoint pt;
        if (std::sscanf(s.c_str(), "%lf,%lf", &pt.p, &pt.q) != 2)
            throw CLI::ValidationError("--seed", "expected p,q");
        seeds.push_back(pt);
    }

    ClassifyOptions copt;
    copt.escape_bound = c.p_bound;
    auto orbits = poincare_section(par, seeds, n_iter, copt);

    fs::path dir = prepare_out(c.out);
    write_poincare_csv(dir / "poincare.csv", orbits);
    long rows = 0;
    for (const auto& o : orbits) rows += static_cast<long>(o.points.size());

    RunManifest manifest("poincare", FPEND_VERSION);
    manifest.set_number("gamma", c.gamma);
    manifest.set_number("n_iter", n_iter);
    manifest.set_config_text(config_echo);
    manifest.add_file("poincare.csv", "poincare_points", rows);
    manifest.write(dir);
    return 0;
}

int run_resonance(const CommonOpts& c, int s, int ell, const std::string& config_echo) {
    SystemParams par = SystemParams::symmetric(c.gamma);
    IslandData island = island_center_and_frequency(par, 1.0);
    ResonanceData res = find_resonance_chain(par, island, s, ell);

    fs::path dir = prepare_out(c.out);
    nlohmann::json j = resonance_to_json(res);
    j["gamma"] = c.gamma;
    j["island_center"] = {island.center.p, island.center.q};
    j["omega0"] = island.omega0;
    j["omega0_raw"] = island.omega0_raw;
    {
        std::ofstream out(dir / "resonance.json");
        out << j.dump(2) << '\n';
    }

    RunManifest manifest("resonance", FPEND_VERSION);
    manifest.set_number("gamma", c.gamma);
    manifest.set_config_text(config_echo);
    manifest.add_file("resonance.json", "resonance_parameters", 1);
    manifest.write(dir);

    std::printf("s=%d ell=%d I0=%.6f m0=%.6f V0=%.8g\n", res.s, res.ell, res.action_center,
                res.effective_mass, res.coupling);
    return 0;
}

int run_floquet(const CommonOpts& c, double inv_hbar, const std::string& config_echo) {
    SystemParams par = SystemParams::symmetric(c.gamma, 1.0 / inv_hbar);
    MomentumBasis basis = make_basis(par.hbar, c.p_bound);
    Eigen::MatrixXcd u = build_propagator(par, basis, c.steps);
    FloquetSpectrum sp = diagonalize(u, par, basis, c.steps);

    std::vector<double> sigma;
    if (c.gamma > 0.0) {
        IslandData island = island_center_and_frequency(par, 1.0);
        sigma = overlaps(sp, coherent_vector(basis, {island.center.p, island.center.q,
                                                     par.hbar}));
    } else {
        sigma = overlaps(sp, coherent_vector(basis, {1.0, 0.0, par.hbar}));
    }

    fs::path dir = prepare_out(c.out);
    write_spectrum_csv(dir / "spectrum.csv", sp, sigma);
    write_eigenvector_dump(dir / "eigenvectors.bin", sp);

    RunManifest manifest("floquet", FPEND_VERSION);
    manifest.set_number("gamma", c.gamma);
    manifest.set_number("inv_hbar", inv_hbar);
    manifest.set_number("n_max", basis.n_max);
    manifest.set_number("steps_per_period", c.steps);
    manifest.set_string("eigenvector_layout",
                        "column-major complex double pairs (re, im), dim x dim");
    manifest.set_config_text(config_echo);
    manifest.add_file("spectrum.csv", "floquet_spectrum", sp.dim());
    manifest.add_file("eigenvectors.bin", "eigenvector_dump",
                      static_cast<long>(sp.dim()) * sp.dim());
    manifest.write(dir);
    return 0;
}

SweepConfig sweep_config_from(const CommonOpts& c, const RangeSpec& range,
                              double sigma_filter, bool audit,
                              const std::optional<PhaseSpacePoint>& probe) {
    SweepConfig cfg;
    cfg.gamma = c.gamma;
    cfg.inv_hbar_min = range.min;
    cfg.inv_hbar_max = range.max;
    cfg.points = range.count;
    cfg.sigma_filter = sigma_filter;
    cfg.p_bound = c.p_bound;
    cfg.steps_per_period = c.steps;
    cfg.audit = audit;
    cfg.threads = c.threads;
    cfg.probe_center = probe;
    return cfg;
}

int run_splittings(const CommonOpts& c, const SweepConfig& cfg, bool with_levels,
                   const std::string& config_echo) {
    SweepResult result = with_levels ? level_dynamics(cfg) : splitting_sweep(cfg);
    fs::path dir = prepare_out(c.out);
    write_splittings_csv(dir / "splittings.csv", result);

    RunManifest manifest(with_levels ? "leveldyn" : "splittings", FPEND_VERSION);
    manifest.set_sweep(result);
    manifest.set_config_text(config_echo);
    manifest.add_file("splittings.csv", "splitting_records",
                      static_cast<long>(result.records.size()));
    if (with_levels) {
        write_leveldyn_csv(dir / "leveldyn.csv", result);
        long rows = 0;
        for (const auto& r : result.records) rows += r.retained_count;
        manifest.add_file("leveldyn.csv", "level_dynamics", rows);
    }
    manifest.write(dir);
    return 0;
}

int run_rat(const CommonOpts& c, const SweepConfig& cfg,
            const std::vector<std::string>& chain_specs,
            const std::vector<std::string>& resonance_files, int area_grid, int area_iters,
            const std::string& config_echo) {
    SystemParams par = SystemParams::symmetric(c.gamma);
    IslandData island = island_center_and_frequency(par, 1.0);

    std::vector<ResonanceData> resonances;
    for (const auto& file : resonance_files) {
        std::ifstream in(file);
        if (!in) throw std::runtime_error("cannot read resonance file: " + file);
        nlohmann::json j;
        in >> j;
        resonances.push_back(resonance_from_json(j));
    }
    for (const auto& spec : chain_specs) {
        int s = 0, ell = 0;
        if (std::sscanf(spec.c_str(), "%d/%d", &s, &ell) != 2)
            throw CLI::ValidationError("--chain", "expected s/ell, e.g. 3/7");
        resonances.push_back(find_resonance_chain(par, island, s, ell));
    }
    if (resonances.empty())
        throw CLI::ValidationError("--chain", "need at least one chain or resonance file");

    IslandAreaOptions aopt;
    aopt.grid_p = area_grid;
    aopt.grid_q = area_grid;
    aopt.n_iter = area_iters;
    IslandData full = island_area(par, island, aopt);

    SweepResult sweep = splitting_sweep(cfg);
    auto rows = rat_overlay(sweep, resonances, full.action, full.area);

    fs::path dir = prepare_out(c.out);
    write_rat_csv(dir / "rat.csv", rows);
    write_splittings_csv(dir / "splittings.csv", sweep);

    RunManifest manifest("rat", FPEND_VERSION);
    manifest.set_sweep(sweep);
    manifest.set_number("island_area", full.area);
    manifest.set_number("chaos_border_action", full.action);
    for (size_t i = 0; i < resonances.size(); ++i)
        manifest.set_string("resonance_" + std::to_string(i),
                            std::to_string(resonances[i].s) + "/" +
                                std::to_string(resonances[i].ell) +
                                " V0=" + format_double(resonances[i].coupling));
    manifest.set_config_text(config_echo);
    manifest.add_file("rat.csv", "rat_overlay", static_cast<long>(rows.size()));
    manifest.add_file("splittings.csv", "splitting_records",
                      static_cast<long>(sweep.records.size()));
    manifest.write(dir);
    return 0;
}

int run_husimi(const CommonOpts& c, double inv_hbar, std::optional<double> eps_target,
               int state_index, const HusimiGrid& grid, const std::string& config_echo) {
    SystemParams par = SystemParams::symmetric(c.gamma, 1.0 / inv_hbar);
    MomentumBasis basis = make_basis(par.hbar, c.p_bound);
    FloquetSpectrum sp = diagonalize(build_propagator(par, basis, c.steps), par, basis,
                                     c.steps);

    int index = state_index;
    if (eps_target) {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < sp.dim(); ++i) {
            double d = circle_distance(sp.quasienergies[i], *eps_target, par.hbar);
            if (d < best) {
                best = d;
                index = i;
            }
        }
    }
    if (index < 0 || index >= sp.dim())
        throw CLI::ValidationError("--state-index", "index outside the spectrum");

    HusimiField field = husimi(sp.vectors.col(index), basis, grid);
    fs::path dir = prepare_out(c.out);
    std::string state_id = "gamma=" + format_double(c.gamma) +
                           " inv_hbar=" + format_double(inv_hbar) +
                           " index=" + std::to_string(index) +
                           " quasienergy=" + format_double(sp.quasienergies[index]);
    write_husimi_csv(dir / "husimi.csv", field);
    write_husimi_header_json(dir / "husimi.json", field, state_id);

    RunManifest manifest("husimi", FPEND_VERSION);
    manifest.set_number("gamma", c.gamma);
    manifest.set_number("inv_hbar", inv_hbar);
    manifest.set_number("state_index", index);
    manifest.set_number("quasienergy", sp.quasienergies[index]);
    manifest.set_config_text(config_echo);
    manifest.add_file("husimi.csv", "husimi_matrix", grid.np);
    manifest.add_file("husimi.json", "husimi_header", 1);
    manifest.write(dir);

    std::printf("state %d at quasienergy %.9g\n", index, sp.quasienergies[index]);
    return 0;
}

int run_pn(const CommonOpts& c, const RangeSpec& range, double area_override,
           double omega_prefactor, int area_grid, int area_iters,
           const std::string& config_echo) {
    double area = area_override;
    if (area <= 0.0) {
        SystemParams par = SystemParams::symmetric(c.gamma);
        IslandData island = island_center_and_frequency(par, 1.0);
        IslandAreaOptions aopt;
        aopt.grid_p = area_grid;
        aopt.grid_q = area_grid;
        aopt.n_iter = area_iters;
        area = island_area(par, island, aopt).area;
    }

    fs::path dir = prepare_out(c.out);
    std::ofstream out(dir / "pn.csv");
    out << "inv_hbar,n_states,estimate,branch\n";
    for (int i = 0; i < range.count; ++i) {
        double inv = range.count > 1
                         ? range.min + (range.max - range.min) * i / (range.count - 1.0)
                         : range.min;
        PnEstimate est = pn_splitting_estimate(area, 1.0 / inv, omega_prefactor);
        out << format_double(inv) << ',' << format_double(est.n_states) << ','
            << format_double(est.value) << ','
            << (est.branch == PnBranch::Asymptotic ? "asymptotic" : "incomplete_gamma")
            << '\n';
    }

    RunManifest manifest("pn", FPEND_VERSION);
    manifest.set_number("gamma", c.gamma);
    manifest.set_number("island_area", area);
    manifest.set_number("omega_prefactor", omega_prefactor);
    manifest.set_config_text(config_echo);
    manifest.add_file("pn.csv", "pn_estimate", range.count);
    manifest.write(dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classical and Floquet analysis of the driven pendulum: tunnelling "
                 "splittings, resonance chains, and semiclassical predictions"};
    app.set_config("--config", "", "ini-style configuration file");
    app.require_subcommand(1);

    CommonOpts common;

    // poincare
    auto* cmd_poincare = app.add_subcommand("poincare", "stroboscopic section point clouds");
    add_common(cmd_poincare, common);
    std::string seed_line = "-2.4:2.4:49:0";
    std::vector<std::string> extra_seeds;
    int n_iter = 400;
    cmd_poincare->add_option("--seed-line", seed_line, "seed ray pmin:pmax:count[:q]")
        ->capture_default_str();
    cmd_poincare->add_option("--seed", extra_seeds, "extra seed p,q (repeatable)");
    cmd_poincare->add_option("--n-iter", n_iter, "strobe iterations per seed")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    // resonance
    auto* cmd_resonance = app.add_subcommand("resonance", "extract s:ell chain parameters");
    add_common(cmd_resonance, common);
    int chain_s = 3, chain_ell = 7;
    cmd_resonance->add_option("--s", chain_s, "windings")->capture_default_str();
    cmd_resonance->add_option("--ell", chain_ell, "chain order")->capture_default_str();

    // floquet
    auto* cmd_floquet = app.add_subcommand("floquet", "one-point Floquet spectrum export");
    add_common(cmd_floquet, common);
    double inv_hbar_single = 16.0;
    cmd_floquet->add_option("--inv-hbar", inv_hbar_single, "1/hbar")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    // splittings / leveldyn / rat share sweep flags
    std::string range_text = "5:45:200";
    double sigma_filter = 7e-3;
    bool no_audit = false;
    std::string probe_text;
    auto add_sweep_flags = [&](CLI::App* cmd) {
        add_common(cmd, common);
        cmd->add_option("--inv-hbar-range", range_text, "grid min:max:count")
            ->capture_default_str();
        cmd->add_option("--sigma-filter", sigma_filter, "overlap retention threshold")
            ->capture_default_str();
        cmd->add_flag("--no-audit", no_audit, "skip the per-point convergence audit");
        cmd->add_option("--probe", probe_text, "coherent probe center p,q "
                                               "(default: island center)");
    };
    auto* cmd_splittings = app.add_subcommand("splittings", "doublet splitting sweep");
    add_sweep_flags(cmd_splittings);
    auto* cmd_leveldyn =
        app.add_subcommand("leveldyn", "doublet-calibrated level dynamics sweep");
    add_sweep_flags(cmd_leveldyn);

    auto* cmd_rat = app.add_subcommand("rat", "semiclassical overlay against the sweep");
    add_sweep_flags(cmd_rat);
    std::vector<std::string> chain_specs, resonance_files;
    int area_grid = 72, area_iters = 1000;
    cmd_rat->add_option("--chain", chain_specs, "resonance chain s/ell (repeatable)");
    cmd_rat->add_option("--resonance-json", resonance_files,
                        "previously extracted resonance.json (repeatable)");
    cmd_rat->add_option("--area-grid", area_grid, "island-area grid resolution")
        ->capture_default_str();
    cmd_rat->add_option("--area-iters", area_iters, "island-area classification periods")
        ->capture_default_str();

    // husimi
    auto* cmd_husimi = app.add_subcommand("husimi", "phase-space image of one eigenstate");
    add_common(cmd_husimi, common);
    double husimi_inv_hbar = 30.0;
    std::optional<double> eps_target;
    int state_index = -1;
    HusimiGrid grid;
    cmd_husimi->add_option("--inv-hbar", husimi_inv_hbar, "1/hbar")->capture_default_str();
    cmd_husimi->add_option("--eps", eps_target, "select the state nearest this quasienergy");
    cmd_husimi->add_option("--state-index", state_index, "select a state by spectrum index");
    cmd_husimi->add_option("--p-min", grid.p_min)->capture_default_str();
    cmd_husimi->add_option("--p-max", grid.p_max)->capture_default_str();
    cmd_husimi->add_option("--q-min", grid.q_min)->capture_default_str();
    cmd_husimi->add_option("--q-max", grid.q_max)->capture_default_str();
    cmd_husimi->add_option("--grid-p", grid.np)->capture_default_str();
    cmd_husimi->add_option("--grid-q", grid.nq)->capture_default_str();

    // pn
    auto* cmd_pn = app.add_subcommand("pn", "area-only splitting estimate curve");
    add_common(cmd_pn, common);
    std::string pn_range_text = "10:45:71";
    double pn_area = 0.0, pn_omega = 1.0;
    cmd_pn->add_option("--inv-hbar-range", pn_range_text, "grid min:max:count")
        ->capture_default_str();
    cmd_pn->add_option("--area", pn_area, "island area (0 = measure it)")
        ->capture_default_str();
    cmd_pn->add_option("--omega", pn_omega, "frequency prefactor")->capture_default_str();
    cmd_pn->add_option("--area-grid", area_grid)->capture_default_str();
    cmd_pn->add_option("--area-iters", area_iters)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    apply_threads(common.threads);
    std::string config_echo = app.config_to_str(true, false);

    try {
        if (app.got_subcommand(cmd_poincare))
            return run_poincare(common, seed_line, extra_seeds, n_iter, config_echo);
        if (app.got_subcommand(cmd_resonance))
            return run_resonance(common, chain_s, chain_ell, config_echo);
        if (app.got_subcommand(cmd_floquet))
            return run_floquet(common, inv_hbar_single, config_echo);
        if (app.got_subcommand(cmd_splittings) || app.got_subcommand(cmd_leveldyn)) {
            std::optional<PhaseSpacePoint> probe;
            if (!probe_text.empty()) {
                PhaseSpacePoint pt;
                if (std::sscanf(probe_text.c_str(), "%lf,%lf", &pt.p, &pt.q) != 2)
                    throw CLI::ValidationError("--probe", "expected p,q");
                probe = pt;
            }
            SweepConfig cfg = sweep_config_from(common, parse_range(range_text),
                                                sigma_filter, !no_audit, probe);
            return run_splittings(common, cfg, app.got_subcommand(cmd_leveldyn),
                                  config_echo);
        }
        if (app.got_subcommand(cmd_rat)) {
            std::optional<PhaseSpacePoint> probe;
            if (!probe_text.empty()) {
                PhaseSpacePoint pt;
                if (std::sscanf(probe_text.c_str(), "%lf,%lf", &pt.p, &pt.q) != 2)
                    throw CLI::ValidationError("--probe", "expected p,q");
                probe = pt;
            }
            SweepConfig cfg = sweep_config_from(common, parse_range(range_text),
                                                sigma_filter, !no_audit, probe);
            return run_rat(common, cfg, chain_specs, resonance_files, area_grid, area_iters,
                           config_echo);
        }
        if (app.got_subcommand(cmd_husimi))
            return run_husimi(common, husimi_inv_hbar, eps_target, state_index, grid,
                              config_echo);
        if (app.got_subcommand(cmd_pn))
            return run_pn(common, parse_range(pn_range_text), pn_area, pn_omega, area_grid,
                          area_iters, config_echo);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "fpend: config: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "fpend: numerical: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "fpend: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

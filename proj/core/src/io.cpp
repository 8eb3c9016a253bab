#include "fpend/io.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fpend/errors.hpp"

namespace fpend {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string quote_csv(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += '"';
    return out;
}

const char* orbit_class_name(OrbitClass c) {
    switch (c) {
        case OrbitClass::Regular: return "regular";
        case OrbitClass::Chaotic: return "chaotic";
        case OrbitClass::Escaped: return "escaped";
    }
    return "unknown";
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_splittings_csv(const std::filesystem::path& path, const SweepResult& result) {
    auto out = open_out(path);
    out << "inv_hbar,delta_eps0,eps_plus,eps_minus,sigma_plus,sigma_minus,"
           "ambiguous,audited,certified,audit_drift,n_max,steps,error\n";
    for (const auto& r : result.records) {
        out << format_double(r.inv_hbar) << ',' << format_double(r.delta) << ','
            << format_double(r.eps_plus) << ',' << format_double(r.eps_minus) << ','
            << format_double(r.sigma_plus) << ',' << format_double(r.sigma_minus) << ','
            << int(r.ambiguous) << ',' << int(r.audited) << ',' << int(r.certified) << ','
            << format_double(r.audit_drift) << ',' << r.n_max << ',' << r.steps << ','
            << quote_csv(r.error) << '\n';
    }
}

SweepResult load_splittings_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty splittings csv: " + path.string());
    SweepResult result;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 13)
            throw std::runtime_error("malformed splittings row in " + path.string());
        SplittingRecord r;
        r.inv_hbar = std::stod(f[0]);
        r.delta = std::stod(f[1]);
        r.eps_plus = std::stod(f[2]);
        r.eps_minus = std::stod(f[3]);
        r.sigma_plus = std::stod(f[4]);
        r.sigma_minus = std::stod(f[5]);
        r.ambiguous = f[6] == "1";
        r.audited = f[7] == "1";
        r.certified = f[8] == "1";
        r.audit_drift = std::stod(f[9]);
        r.n_max = std::stoi(f[10]);
        r.steps = std::stoi(f[11]);
        r.error = f[12];
        result.records.push_back(std::move(r));
    }
    result.config.points = static_cast<int>(result.records.size());
    return result;
}

void write_leveldyn_csv(const std::filesystem::path& path, const SweepResult& result) {
    auto out = open_out(path);
    out << "inv_hbar,rel_quasienergy,sigma,parity\n";
    for (const auto& r : result.records)
        for (const auto& lvl : r.levels)
            out << format_double(r.inv_hbar) << ',' << format_double(lvl.rel_quasienergy)
                << ',' << format_double(lvl.sigma) << ',' << lvl.parity << '\n';
}

void write_rat_csv(const std::filesystem::path& path, const std::vector<RatCurveRow>& rows) {
    auto out = open_out(path);
    out << "inv_hbar,delta_eps0,k_c,v_eff,rat_mean,band_lo,band_hi,pn_estimate,"
           "mechanism,certified,ambiguous,error\n";
    for (const auto& r : rows) {
        out << format_double(r.inv_hbar) << ',' << format_double(r.delta_quantum) << ','
            << r.k_c << ',' << format_double(r.v_eff) << ',' << format_double(r.mean) << ','
            << format_double(r.band_lo) << ',' << format_double(r.band_hi) << ','
            << format_double(r.pn_estimate) << ',' << quote_csv(r.mechanism) << ','
            << int(r.certified) << ',' << int(r.ambiguous) << ',' << quote_csv(r.error)
            << '\n';
    }
}

void write_poincare_csv(const std::filesystem::path& path,
                        const std::vector<StroboscopicOrbit>& orbits) {
    auto out = open_out(path);
    out << "seed_p,seed_q,iter,p,q,class\n";
    for (const auto& orbit : orbits) {
        const char* cls = orbit_class_name(orbit.classification);
        for (size_t k = 0; k < orbit.points.size(); ++k)
            out << format_double(orbit.seed.p) << ',' << format_double(orbit.seed.q) << ','
                << k + 1 << ',' << format_double(orbit.points[k].p) << ','
                << format_double(orbit.points[k].q) << ',' << cls << '\n';
    }
}

void write_profile_csv(const std::filesystem::path& path,
                       const std::vector<RotationSample>& samples) {
    auto out = open_out(path);
    out << "seed_p,seed_q,action,omega,omega_raw\n";
    for (const auto& s : samples)
        out << format_double(s.seed.p) << ',' << format_double(s.seed.q) << ','
            << format_double(s.action) << ',' << format_double(s.omega) << ','
            << format_double(s.omega_raw) << '\n';
}

void write_spectrum_csv(const std::filesystem::path& path, const FloquetSpectrum& spectrum,
                        const std::vector<double>& sigma) {
    if (!sigma.empty() && static_cast<int>(sigma.size()) != spectrum.dim())
        throw std::invalid_argument("write_spectrum_csv: sigma size mismatch");
    auto out = open_out(path);
    out << "index,quasienergy,sigma_overlap\n";
    for (int i = 0; i < spectrum.dim(); ++i)
        out << i << ',' << format_double(spectrum.quasienergies[i]) << ','
            << format_double(sigma.empty() ? 0.0 : sigma[i]) << '\n';
}

void write_eigenvector_dump(const std::filesystem::path& path,
                            const FloquetSpectrum& spectrum) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    const auto& m = spectrum.vectors;
    for (int col = 0; col < m.cols(); ++col)
        for (int row = 0; row < m.rows(); ++row) {
            double re = m(row, col).real(), im = m(row, col).imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof re);
            out.write(reinterpret_cast<const char*>(&im), sizeof im);
        }
}

void write_husimi_csv(const std::filesystem::path& path, const HusimiField& field) {
    auto out = open_out(path);
    for (int i = 0; i < field.intensity.rows(); ++i) {
        for (int j = 0; j < field.intensity.cols(); ++j) {
            if (j) out << ',';
            out << format_double(field.intensity(i, j));
        }
        out << '\n';
    }
}

void write_husimi_header_json(const std::filesystem::path& path, const HusimiField& field,
                              const std::string& state_id) {
    json j;
    j["state"] = state_id;
    j["p_min"] = field.grid.p_min;
    j["p_max"] = field.grid.p_max;
    j["q_min"] = field.grid.q_min;
    j["q_max"] = field.grid.q_max;
    j["np"] = field.grid.np;
    j["nq"] = field.grid.nq;
    j["layout"] = "rows are ascending p, columns ascending q";
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

struct RunManifest::Impl {
    json j;
};

RunManifest::RunManifest(std::string command, std::string version)
    : impl_(std::make_shared<Impl>()) {
    impl_->j["schema_version"] = 1;
    impl_->j["tool"] = "fpend";
    impl_->j["version"] = version;
    impl_->j["command"] = command;
    impl_->j["files"] = json::array();
}

void RunManifest::add_file(const std::string& name, const std::string& kind, long rows) {
    impl_->j["files"].push_back({{"name", name}, {"kind", kind}, {"rows", rows}});
}

void RunManifest::set_config_text(const std::string& text) {
    impl_->j["effective_config"] = text;
}

void RunManifest::set_number(const std::string& key, double value) { impl_->j[key] = value; }

void RunManifest::set_string(const std::string& key, const std::string& value) {
    impl_->j[key] = value;
}

void RunManifest::set_sweep(const SweepResult& result) {
    json cfg;
    cfg["gamma"] = result.config.gamma;
    cfg["inv_hbar_min"] = result.config.inv_hbar_min;
    cfg["inv_hbar_max"] = result.config.inv_hbar_max;
    cfg["points"] = result.config.points;
    cfg["sigma_filter"] = result.config.sigma_filter;
    cfg["p_bound"] = result.config.p_bound;
    cfg["steps_per_period"] = result.config.steps_per_period;
    cfg["audit"] = result.config.audit;
    cfg["probe_p"] = result.probe.p;
    cfg["probe_q"] = result.probe.q;
    cfg["omega0"] = result.omega0;
    cfg["omega0_raw"] = result.omega0_raw;
    impl_->j["sweep_config"] = cfg;

    json pts = json::array();
    int certified = 0, failed = 0;
    for (const auto& r : result.records) {
        pts.push_back({{"inv_hbar", r.inv_hbar},
                       {"n_max", r.n_max},
                       {"steps", r.steps},
                       {"audited", r.audited},
                       {"certified", r.certified},
                       {"audit_drift", r.audit_drift},
                       {"ambiguous", r.ambiguous},
                       {"error", r.error}});
        certified += r.certified;
        failed += !r.ok();
    }
    impl_->j["points"] = pts;
    impl_->j["audit_summary"] = {{"certified", certified},
                                 {"failed", failed},
                                 {"total", static_cast<int>(result.records.size())}};
}

void RunManifest::write(const std::filesystem::path& directory) const {
    auto out = open_out(directory / "manifest.json");
    out << impl_->j.dump(2) << '\n';
}

}  // namespace fpend

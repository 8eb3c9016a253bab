#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "fpend/phase_space.hpp"
#include "fpend/sweep.hpp"

namespace fpend {

/// Round-trip decimal formatting (17 significant digits).
std::string format_double(double v);

// CSV schemas are fixed; every writer emits an RFC-4180-style header row and
// full round-trip precision. Schema changes bump the manifest schema_version.

void write_splittings_csv(const std::filesystem::path& path, const SweepResult& result);
SweepResult load_splittings_csv(const std::filesystem::path& path);

void write_leveldyn_csv(const std::filesystem::path& path, const SweepResult& result);

void write_rat_csv(const std::filesystem::path& path, const std::vector<RatCurveRow>& rows);

void write_poincare_csv(const std::filesystem::path& path,
                        const std::vector<StroboscopicOrbit>& orbits);

void write_profile_csv(const std::filesystem::path& path,
                       const std::vector<RotationSample>& samples);

void write_spectrum_csv(const std::filesystem::path& path, const FloquetSpectrum& spectrum,
                        const std::vector<double>& sigma);

/// Eigenvector dump: raw little-endian doubles (re, im interleaved, column
/// major); the matching metadata lives in the run manifest.
void write_eigenvector_dump(const std::filesystem::path& path,
                            const FloquetSpectrum& spectrum);

void write_husimi_csv(const std::filesystem::path& path, const HusimiField& field);
void write_husimi_header_json(const std::filesystem::path& path, const HusimiField& field,
                              const std::string& state_id);

/// One manifest per output directory, describing every data file in it.
class RunManifest {
  public:
    RunManifest(std::string command, std::string version);

    void add_file(const std::string& name, const std::string& kind, long rows);
    void set_config_text(const std::string& text);
    void set_number(const std::string& key, double value);
    void set_string(const std::string& key, const std::string& value);
    void set_sweep(const SweepResult& result);  // per-point n_max/steps/audit data

    void write(const std::filesystem::path& directory) const;

  private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

}  // namespace fpend

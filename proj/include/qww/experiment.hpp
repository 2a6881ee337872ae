#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qww/continuum.hpp"
#include "qww/report.hpp"
#include "qww/types.hpp"

namespace qww {

class ConfigError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitTolerance = 2 };

/// Flat run configuration. Keys of the JSON form match the member names.
struct ExperimentConfig {
  std::string command;
  std::string out = "qww_out";
  std::uint64_t seed = 20240601;

  std::size_t n_sites = 32;
  std::size_t steps = 40;
  long window = 8;
  long j0 = -1;  // negative: centre of the history
  double theta = 0.3;
  std::string state = "packet";  // packet | plane_wave | random | zero
  double k0 = 0.5;
  double sigma_k = 0.6;
  std::string branch = "positive";
  double spin_mix = 0.0;
  bool tail_check = false;
  long mode = 1;
  long omega_index = 0;  // > 0: choose theta so 2 omega = 2 pi omega_index / (2 window + 1)
  std::string taper = "none";
  double taper_width = 0.0;

  std::vector<double> eps_list;
  double mass = 1.0;
  double box_length = 16.0;
  double t_final = 0.0;
  double K0 = 0.0;
  double sigma_K = 1.5;
  double tau = 0.5;
  std::size_t samples = 32;

  std::string variant = "ledger";  // ledger | printed
  std::size_t fields = 100;
  double hook_d2_scale = 1.0;

  nlohmann::ordered_json to_json() const;
};

ExperimentConfig default_config(const std::string& command);

/// Overlays a flat JSON object; unknown keys and wrong types raise ConfigError.
void apply_json(ExperimentConfig& cfg, const nlohmann::json& patch);

/// "0.125,1/16, 0.03125" -> values.
std::vector<double> parse_eps_list(const std::string& text);

/// Variant flags used for this run, embedded in every output.
nlohmann::ordered_json variant_flags(const ExperimentConfig& cfg);

/// Runs cfg.command, writing results under cfg.out. Returns the exit code;
/// precondition and configuration errors are reported on `err` as code 1.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);

// Suites shared with the acceptance harness.

/// Inversion identities, product rules, linearity and shift commutation on
/// random complex fields over (time windowed J) x (space periodic N).
ResidualReport identity_suite(std::size_t fields, std::size_t sites, std::size_t steps, std::uint64_t seed);

/// Spectral derivative identities on one random field of N sites, plus the
/// slope of |fourier_der1_symbol - second-order expansion| against eps
/// (entry "expansion_remainder": max_abs holds the slope).
ResidualReport spectral_suite(std::size_t sites, std::uint64_t seed);

std::string format_double(double v);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace qww

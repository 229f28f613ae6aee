// Experiment runner behind the command-line tool: one command per exhibit,
// each a pure function of (config, seed) writing CSV/JSON into the output
// directory.
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace qst::cli {

// exit code 2
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// exit code 3
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Experiment { Table1, Fig2, Fig3, Fig5, Table2, Fig4, Fig6, Fig7 };

Experiment parse_experiment(const std::string& name);
std::string experiment_name(Experiment e);

struct RunConfig {
  std::uint64_t seed{1};
  Experiment experiment{Experiment::Table1};
  std::filesystem::path out_dir;
  std::size_t n_mc{1000};
  std::size_t m_samples{7000};
  double n_scale{1800};   // expected counts per tomography setting
  double threshold{0};    // fidelity threshold; 0 selects the exhibit default
  std::vector<int> states;  // 1-based selection; empty = all
  bool noiseless{false};
  double noise_scale{1.0};  // count-resampling std in units of sqrt(n)
  double fit_n_s{0.2122};   // generating n_s for the noiseless variance fit
  int histogram_bins{25};
};

// Applies a JSON object of overrides on top of `base`; rejects unknown keys.
RunConfig apply_overrides(RunConfig base, const nlohmann::json& overrides);

// Stable fingerprint of the effective configuration (FNV-1a over the
// canonical text form); embedded in every output header.
std::uint64_t config_fingerprint(const RunConfig& config);
std::string header_line(const RunConfig& config);

// Writes every output file of the selected experiment; throws ConfigError or
// NumericalError.
void run_experiment(const RunConfig& config);

}  // namespace qst::cli

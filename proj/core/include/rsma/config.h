#pragma once
// Experiment configuration: one JSON document per run. Parsing is strict
// (unknown keys and type mismatches are errors that name the line).
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rsma/ao.h"
#include "rsma/uncertainty.h"

namespace rsma {

enum class ExperimentKind { MaxMinSweep, PowerFeasibility, DofSweep };
const char* to_string(ExperimentKind k);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::MaxMinSweep;
  std::string id;  // experiment column of the CSV; defaults to the kind keyword
  int users = 3;
  int antennas = 3;
  double sigma2 = 1.0;
  std::vector<double> snr_db;
  std::variant<double, RadiusLaw> delta = 0.1;
  std::vector<double> delta_grid;  // PowerFeasibility; empty means {delta}
  int channels = 20;
  std::uint64_t seed = 1;
  double target_rate = 0.0;  // PowerFeasibility
  int oracle_samples = 2000;
  int dof_fit_points = 6;   // highest SNR points used by the slope fit
  bool record_timing = false;
  AoConfig ao;

  /// Radius at transmit power pt (fixed delta or the law).
  double radius(double pt) const;
  /// The delta values swept by PowerFeasibility.
  std::vector<double> power_deltas() const;
  /// Throws ConfigError.
  void validate() const;
};

/// Keyword used in files and on the command line: maxmin | minpower | dof.
const char* keyword(ExperimentKind k);

ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "config");
/// Throws ConfigError, with line 0 when the file cannot be read.
ExperimentConfig parse_config(const std::string& path);
/// Pretty-printed JSON that parse_config_text maps back to an equal config.
std::string serialize_config(const ExperimentConfig& config);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace rsma

#pragma once
// Seeded Monte-Carlo experiments: max-min rate sweeps, power feasibility
// over a radius grid and DoF sweeps of the constructive scheme. Every
// channel draw is shared by all schemes, and rows come back sorted so the
// output does not depend on the number of worker threads.
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rsma/config.h"
#include "rsma/dof.h"

namespace rsma {

struct ResultRow {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  std::string experiment;
  int channel = 0;
  std::uint64_t seed = 0;
  double snr_db = kNaN;  // NaN for power rows
  double delta = 0.0;
  std::string scheme;    // RS | NoRS | ZfConstructive
  std::string status;    // AoStatus name
  double objective = kNaN;
  std::vector<double> rates;  // per-user total rates
  double common_rate = 0.0;
  int iterations = 0;
  double wall_time_ms = 0.0;
};

struct SchemeFit {
  std::string scheme;
  DofEstimate estimate;
  double predicted = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<SchemeFit> fits;  // DofSweep only
  int resampled = 0;            // rank-deficient draws replaced (DofSweep)
  int solves = 0;
  int failures = 0;             // rows with status SolverFailure
};

/// True channels and unit-ball error directions of one channel draw. The
/// estimate at radius d is h - d * direction, so draws at different radii
/// share the same error direction.
struct ChannelDraw {
  std::vector<CVector> h;
  std::vector<CVector> direction;
  std::vector<ChannelInstance> at(double delta) const;
};

ChannelDraw draw_channel(std::uint64_t seed, int channel, int users, int antennas);

double db_to_linear(double db);

ExperimentResult run_maxmin_sweep(const ExperimentConfig& config, int jobs = 1);
ExperimentResult run_power_feasibility(const ExperimentConfig& config, int jobs = 1);
ExperimentResult run_dof_sweep(const ExperimentConfig& config, int jobs = 1);
ExperimentResult run_experiment(const ExperimentConfig& config, int jobs = 1);

/// Deterministic order: channel, snr, delta, scheme.
void sort_rows(std::vector<ResultRow>& rows);

}  // namespace rsma

#pragma once
// Result persistence: the fixed-column CSV and a JSON summary with per-point
// aggregates for plotting.
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsma/config.h"
#include "rsma/experiment.h"

namespace rsma {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// experiment,channel,seed,snr_db,delta,scheme,status,objective,
/// rate_user1..rate_userK,common_rate,iterations,wall_time_ms
/// Numbers use 17 significant digits; NaN is written as "nan".
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& in);

/// Throws ContractError for empty rows and IoError when the file cannot be
/// written.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

/// Aggregates per (snr or delta, scheme): counts, feasible counts and
/// mean/min/max of the objective over rows with a finite objective. Power
/// experiments add averages over the channels feasible for both schemes;
/// DoF sweeps add the fitted slopes and the predicted values.
std::string summary_json(const ExperimentConfig& config, const ExperimentResult& result);
void emit_summary(const ExperimentConfig& config, const ExperimentResult& result,
                  const std::string& path);

}  // namespace rsma

#pragma once
// Alternating optimization for the conservative max-min rate and minimum
// power designs: equalizer SDPs per stream, reciprocal weight update, then a
// precoder SDP with equalizers and weights fixed.
#include <optional>
#include <vector>

#include "rsma/conic.h"
#include "rsma/model.h"
#include "rsma/sdp.h"
#include "rsma/uncertainty.h"
#include "rsma/wmse.h"

namespace rsma {

enum class Strategy { RS, NoRS };
enum class AoStatus { Converged, IterationCap, Infeasible, SolverFailure };
const char* to_string(Strategy s);
const char* to_string(AoStatus s);

struct InitStrategy {
  enum class Kind { MrtEqualSplit, ZfEqualSplit, WarmStart };
  Kind kind = Kind::MrtEqualSplit;
  Precoder warm;                         // WarmStart only
  std::optional<WmseState> equalizers;   // optional equalizer candidates

  static InitStrategy warm_start(Precoder p, std::optional<WmseState> eq = std::nullopt);
};

struct AoConfig {
  double tol_rel = 1e-4;
  int max_iter = 200;
  int bootstrap_max = 10;
  int bootstrap_iterations = 5;
  std::optional<double> bootstrap_p0;  // default sigma2 (2^target - 1)
  InitStrategy init;
  SolverOptions solver;
  void validate() const;
};

/// One design problem: regions (one per user), noise level and strategy.
struct DesignSpec {
  Strategy strategy = Strategy::RS;
  std::vector<UncertaintyRegion> regions;
  double sigma2 = 1.0;
  bool zero_common = false;  // RS with the common column pinned to zero

  int users() const { return static_cast<int>(regions.size()); }
  int antennas() const;
  bool has_common() const { return strategy == Strategy::RS; }
  void validate() const;
};

/// Drops the common stream: no common column, LMIs, equalizers or weights.
DesignSpec restrict_nors(DesignSpec spec);

struct Objective {
  enum class Kind { MaxMinRate, MinPower };
  Kind kind = Kind::MaxMinRate;
  double value = 1.0;  // power budget or rate target

  static Objective max_min_rate(double pt) { return {Kind::MaxMinRate, pt}; }
  static Objective min_power(double target) { return {Kind::MinPower, target}; }
};

/// Certified worst-case figures of a precoder at fixed equalizers, with the
/// best weights and the max-min split of the common rate.
struct Evaluation {
  std::vector<double> mse_c;   // worst-case MSEs
  std::vector<double> mse;
  std::vector<double> rate_c;  // -log2 of the above
  std::vector<double> rate;
  RateSplit split;
  std::vector<double> total;   // rate_k + c_k
  double min_total = 0.0;
};

Evaluation evaluate_design(const DesignSpec& spec, const Precoder& p, const WmseState& eq);

/// max_c min_k (r_k + c_k) s.t. c >= 0, sum c = r_c (water filling).
RateSplit max_min_split(std::span<const double> private_rates, double r_c);

struct EqualizerStepResult {
  Complex g;
  double eps_cons = 1.0;
  SolveStatus status = SolveStatus::NumericalTrouble;
};

EqualizerStepResult equalizer_step(const UncertaintyRegion& region, const Precoder& p,
                                   double sigma2, int k, Stream stream,
                                   const SolverOptions& options = {});

/// 1 / eps_cons. Throws DomainError for nonpositive input.
double weight_step(double eps_cons);

struct PrecoderStepResult {
  Precoder precoder;
  RateSplit split;
  double value = 0.0;  // R_t for the rate step, tr(PP^H) for the power step
  std::vector<double> tau;
  std::vector<double> tau_c;
  SolveStatus status = SolveStatus::NumericalTrouble;
};

PrecoderStepResult precoder_step_rate(const DesignSpec& spec, const WmseState& state, double pt,
                                      const SolverOptions& options = {});
PrecoderStepResult precoder_step_power(const DesignSpec& spec, const WmseState& state,
                                       double target, const SolverOptions& options = {});

/// The conic programs solved by the precoder steps, exposed for inspection
/// and dumping.
ConicProblem build_rate_problem(const DesignSpec& spec, const WmseState& state, double pt);
ConicProblem build_power_problem(const DesignSpec& spec, const WmseState& state, double target);

struct DesignResult {
  Precoder precoder;
  RateSplit split;
  WmseState wmse_state;
  double objective = 0.0;
  std::vector<double> per_user_conservative_rates;
  std::vector<double> common_rates;  // per-user conservative common rates
  std::vector<double> trace;
  AoStatus status = AoStatus::IterationCap;
  int iterations = 0;
};

DesignResult run_ao(const DesignSpec& spec, const Objective& objective,
                    const AoConfig& config = {});

struct BootstrapResult {
  bool feasible = false;
  Precoder precoder;
  WmseState wmse_state;
  double budget = 0.0;
  int rounds = 0;
  double achieved = 0.0;
};

BootstrapResult bootstrap_power_problem(double target, const DesignSpec& spec,
                                        const AoConfig& config = {});

/// Starting precoders of the rate problem.
Precoder mrt_init(const DesignSpec& spec, double pt);
Precoder zf_init(const DesignSpec& spec, double pt);

/// RS precoder built from a NoRS solution: common direction along the
/// dominant singular vector of the estimates at `common_fraction` of
/// `budget`, private part scaled to fit in the rest.
Precoder embed_nors(const DesignSpec& spec, const Precoder& nors, double budget,
                    double common_fraction = 0.01);

/// NoRS design followed by RS warm-started from it. The RS result falls back
/// to the NoRS precoder (pc = 0) when that is better, so RS weakly dominates.
struct PairedDesign {
  DesignResult nors;
  DesignResult rs;
};
PairedDesign design_paired(const DesignSpec& spec, const Objective& objective,
                           const AoConfig& config = {});

}  // namespace rsma

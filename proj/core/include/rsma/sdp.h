#pragma once

// Dense primal-dual interior-point solver for the small conic programs built
// by the design steps. The program
//
//   minimize c'x  s.t.  G x + s = h,  A x = b,  s in K
//
// (K a product of nonnegative orthants, second-order cones and real PSD cones;
// Hermitian LMIs are embedded as real symmetric ones) is solved through its
// homogeneous self-dual embedding with Nesterov-Todd scaling and a Mehrotra
// predictor-corrector step, so infeasible and unbounded programs terminate
// with certificates instead of stalling.

#include <limits>
#include <string>
#include <vector>

#include "rsma/conic.h"
#include "rsma/types.h"

namespace rsma {

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIterations, NumericalTrouble };

const char* to_string(SolveStatus status);

struct SolverOptions {
  double tol = 1e-7;       // duality gap, absolute or relative to |objective|
  double feastol = 1e-7;   // scaled primal and dual residuals
  int max_iter = 100;
};

struct IterationInfo {
  int iteration = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double step = 0.0;
};

struct Solution {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  RVector x;
  double objective = kNaN;       // primal objective, including the constant term
  double dual_objective = kNaN;  // including the constant term
  SolveStatus status = SolveStatus::NumericalTrouble;
  double gap = kNaN;
  int iterations = 0;

  /// Infeasible: dual ray (y, z) with A'y + G'z ~ 0, b'y + h'z = -1, z in K.
  /// Unbounded: primal ray x with A x ~ 0, G x + s ~ 0 (s in K), c'x = -1.
  RVector certificate_x;
  RVector certificate_y;
  RVector certificate_z;

  std::vector<IterationInfo> trace;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Throws ContractError when the problem fails validation or has no cone
/// constraints at all.
Solution solve(const ConicProblem& problem, const SolverOptions& options = {});

}  // namespace rsma

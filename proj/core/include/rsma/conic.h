#pragma once

// Container for the small conic programs solved in each design step:
// a linear objective (minimized) over real variables, subject to affine
// nonnegativity, equality, second-order-cone and Hermitian LMI constraints.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rsma/affine.h"
#include "rsma/lmi.h"

namespace rsma {

struct LinearConstraint {
  AffineExpr expr;
  std::string label;
};

struct ConicProblem {
  std::vector<std::string> var_names;
  AffineExpr objective;                    // minimized
  std::vector<LinearConstraint> nonneg;    // expr >= 0
  std::vector<LinearConstraint> equalities;  // expr == 0
  std::vector<SocConstraint> socs;
  std::vector<LmiConstraint> lmis;

  int n_vars() const { return static_cast<int>(var_names.size()); }
  int add_variable(std::string name);
  /// Two real variables name.re / name.im, returned as re + i*im.
  ComplexAffine add_complex_variable(const std::string& name);

  void add_nonneg(AffineExpr expr, std::string label = {});
  void add_equality(AffineExpr expr, std::string label = {});
  void add_lmi(LmiConstraint lmi);
  void add_soc(SocConstraint soc);
  void add(const SProcedureBlock& block);

  /// Throws ContractError if a constraint references an undeclared variable
  /// or a coefficient is not finite.
  void validate() const;
};

struct ConstraintViolation {
  std::string kind;  // nonneg | eq | soc | lmi
  std::string label;
  int index = 0;
  double magnitude = 0.0;  // 0 when satisfied
};

struct SolutionReport {
  std::vector<ConstraintViolation> constraints;
  double objective = 0.0;
  double max_violation = 0.0;
  const ConstraintViolation* worst() const;
};

SolutionReport check_solution(const ConicProblem& problem, std::span<const double> x);

/// Plain-text sparse dump: a header, the variable list, then one block per
/// constraint with (row, col, re, im) triplets for LMIs. Numbers are written
/// with 17 significant digits so read_problem reproduces the input exactly.
void write_problem(std::ostream& out, const ConicProblem& problem);
ConicProblem read_problem(std::istream& in);

}  // namespace rsma

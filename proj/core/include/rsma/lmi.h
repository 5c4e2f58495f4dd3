#pragma once

// Linear matrix inequalities certifying worst-case MSE levels over a
// spherical channel-uncertainty region (S-procedure form), together with the
// small auxiliary cone constraints used by the design problems.

#include <map>
#include <span>
#include <string>

#include "rsma/affine.h"
#include "rsma/types.h"

namespace rsma {

/// F(x) = constant + sum_i x_i * terms[i] >= 0 with Hermitian coefficients.
struct LmiConstraint {
  int dim = 0;
  CMatrix constant;
  std::map<int, CMatrix> terms;
  std::string label;

  /// Canonical form of a Hermitian affine matrix; throws ContractError if
  /// the matrix is not square or not Hermitian for every assignment.
  static LmiConstraint from_affine(const AffineMatrix& m, std::string label = {});

  CMatrix evaluate(std::span<const double> x) const;
  /// True when every coefficient is real, i.e. the LMI is over symmetric
  /// matrices already.
  bool is_real() const;
};

/// ||entries[1..]|| <= entries[0]
struct SocConstraint {
  std::vector<AffineExpr> entries;
  std::string label;
};

/// LMI plus the multiplier that must stay nonnegative.
struct SProcedureBlock {
  LmiConstraint lmi;
  AffineExpr multiplier;
};

/// Certifies  ||g (h_hat + e)^H M - e_j^T||^2 <= tau  for all ||e|| <= delta,
/// where M = columns (Nt x m) and j = target column. Exactly one of `columns`
/// and `g` may contain variables. The matrix is
///   [ tau - lambda   psi^H            0               ]
///   [ psi            I_m              -delta M^H g^*  ]
///   [ 0              -delta g M       lambda I_Nt     ]
/// with psi^H = g h_hat^H M - e_j^T.
SProcedureBlock build_sprocedure_lmi(const CVector& h_hat, double delta,
                                     const AffineMatrix& columns, const ComplexAffine& g,
                                     int target, const AffineExpr& tau, const AffineExpr& lambda,
                                     std::string label = {});

/// Private stream of user k: M = [p_1 .. p_K], target column k (zero-based).
SProcedureBlock build_private_lmi(const CVector& h_hat, double delta, const AffineMatrix& pp,
                                  const ComplexAffine& g, int k, const AffineExpr& tau,
                                  const AffineExpr& lambda);

/// Common stream: M = [pc p_1 .. p_K] with the common column first, target 0.
SProcedureBlock build_common_lmi(const CVector& h_hat, double delta, const AffineMatrix& p_full,
                                 const ComplexAffine& g_c, const AffineExpr& tau_c,
                                 const AffineExpr& lambda_c);

/// [[s, conj(g)], [g, 1]] >= 0, i.e. s >= |g|^2.
LmiConstraint build_scalar_square_epigraph(const ComplexAffine& g, const AffineExpr& s);

/// ||vec(P)|| <= sqrt(budget). Throws DomainError for a negative budget.
SocConstraint build_power_constraint(const AffineMatrix& p, double budget);
/// ||vec(P)|| <= bound, for power minimization.
SocConstraint build_power_constraint(const AffineMatrix& p, const AffineExpr& bound);

/// A + iB  ->  [[A, -B], [B, A]]. Spectrum is preserved with every
/// eigenvalue doubled in multiplicity.
LmiConstraint realify(const LmiConstraint& lmi);

struct LmiEvaluation {
  CMatrix matrix;
  double min_eigenvalue = 0.0;

  /// min_eig >= -1e-9 (1 + ||F||).
  bool is_psd() const;
};

/// Throws ContractError when `assignment` is shorter than the largest
/// referenced variable index.
LmiEvaluation evaluate_lmi(const LmiConstraint& lmi, std::span<const double> assignment);

double min_hermitian_eigenvalue(const CMatrix& m);

}  // namespace rsma

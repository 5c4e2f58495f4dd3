#pragma once
// Augmented weighted MSE, its rate identity, and the conservative rate bound
// obtained when one equalizer and weight serve every channel in an
// uncertainty region.
//
// The weight enters through the natural log, xi = 1 + (u eps - 1 - ln u) / ln 2,
// so that in bits  min_u xi = 1 + log2(eps) = 1 - R  at u = 1 / eps, and
// 1 - xi(eps, u) <= -log2(eps) holds for every u > 0.
#include "rsma/model.h"
#include "rsma/uncertainty.h"

namespace rsma {

/// Per-user equalizers and weights of the common and private streams.
struct WmseState {
  CVector g_c;
  CVector g;
  RVector u_c;
  RVector u;

  static WmseState unit(int users);
  int users() const { return static_cast<int>(g.size()); }
  /// Throws ContractError on size mismatch or a nonpositive weight.
  void validate() const;
};

/// 1 + (u eps - 1 - ln u) / ln 2. Throws DomainError for u <= 0.
double wmse(double eps, double u);

/// 1 / eps_mmse. Throws DomainError for a nonpositive input.
double optimal_weight(double eps_mmse);

struct IdentityResidual {
  double common = 0.0;
  double priv = 0.0;
};

/// |min_{u,g} xi - (1 - R)| for both streams of user k.
IdentityResidual rate_wmse_identity_check(const CVector& h, const Precoder& p, double sigma2,
                                          int k);

/// 1 - xi(tau + |g|^2 sigma2, u); a lower bound on the worst-case rate for
/// every u > 0 when tau bounds the worst-case squared residual.
double conservative_rate(double tau, Complex g, double u, double sigma2);

/// max_{||e|| <= delta} ||g (h_hat + e)^H M - e_j^T||^2, computed exactly by
/// solving the trust-region secular equation.
double worst_case_residual(const CVector& h_hat, double delta, const CMatrix& m, Complex g,
                           int target);

/// Worst-case MSE of one stream of user k over the region at a fixed
/// equalizer (residual plus |g|^2 sigma2).
double worst_case_mse(const UncertaintyRegion& region, const Precoder& p, double sigma2, int k,
                      Stream stream, Complex g);

}  // namespace rsma

#pragma once
// Constructive precoders from the achievability side of the max-min DoF
// result (best-effort ZF private streams under a random common stream),
// sampled worst-case evaluation of them, and slope fits of rate versus
// log2(Pt).
#include <utility>
#include <vector>

#include "rsma/model.h"
#include "rsma/rng.h"
#include "rsma/uncertainty.h"

namespace rsma {

/// Power exponents: ||pc||^2 = O(Pt^a_c), ||p_k||^2 = O(Pt^a).
struct SchemeExponents {
  double a_c = 1.0;
  double a = 1.0;
  void validate() const;
};

struct DofEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<std::pair<double, double>> points;  // (Pt, rate)
};

/// Normalized columns of the pseudo-inverse of H_hat^H (Nt x K), each with
/// power Pt^alpha / K. Throws DomainError if H_hat is rank deficient.
CMatrix zf_private_precoders(const CMatrix& h_hat, double alpha, double pt);

/// Uniform direction on the unit sphere with squared norm `power`.
CVector random_common_precoder(Rng& rng, int antennas, double power);

/// ZF private part at Pt^alpha plus a random common column at Pt - Pt^alpha.
Precoder constructive_scheme(const CMatrix& h_hat, double alpha, double pt, Rng& rng);

/// Exponents realized by constructive_scheme.
SchemeExponents constructive_exponents(double alpha);

struct SchemeRates {
  std::vector<double> priv;   // sampled worst-case private rates
  double r_c = 0.0;           // min over users of the worst-case common rates
  std::vector<double> total;  // priv + r_c / K
  double min_total = 0.0;
};

/// Sampled worst-case rates of a fixed precoder with the common rate split
/// equally among the users.
SchemeRates evaluate_scheme(const Precoder& p, const std::vector<ChannelInstance>& instances,
                            double sigma2, int n_samples, Rng& rng);

/// evaluate_scheme(...).min_total
double evaluate_scheme_minrate(const Precoder& p, const std::vector<ChannelInstance>& instances,
                               double sigma2, int n_samples, Rng& rng);

/// Least-squares fit rate = slope * log2(Pt) + intercept.
DofEstimate dof_estimate(const std::vector<std::pair<double, double>>& points);

struct DofPrediction {
  double d_nors = 0.0;
  double d_rs = 0.0;
};

/// Max-min DoF of NoRS (alpha) and RS ((1 + (K-1) alpha) / K). Needs K >= 2.
DofPrediction theorem1_predictions(int users, double alpha);

/// Columns h_hat_k of the regions as an Nt x K matrix.
CMatrix estimate_matrix(const std::vector<ChannelInstance>& instances);

}  // namespace rsma

#include "rsma/dof.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsma {

void SchemeExponents::validate() const {
  require(a_c >= 0 && a_c <= 1 && a >= 0 && a <= 1, "SchemeExponents: exponents must lie in [0,1]");
}

CMatrix zf_private_precoders(const CMatrix& h_hat, double alpha, double pt) {
  require(h_hat.rows() >= 1 && h_hat.cols() >= 1, "zf_private_precoders: empty estimate matrix");
  require(h_hat.cols() <= h_hat.rows(), "zf_private_precoders: need K <= Nt");
  require(alpha >= 0 && alpha <= 1, "zf_private_precoders: alpha must lie in [0,1]");
  require(pt >= 1, "zf_private_precoders: Pt must be >= 1");
  Eigen::JacobiSVD<CMatrix> svd(h_hat);
  const RVector& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-10 * sv(0))) {
    throw DomainError("zf_private_precoders: estimate matrix is rank deficient");
  }
  // H_hat^H P = I for P = H_hat (H_hat^H H_hat)^{-1}.
  const CMatrix gram = h_hat.adjoint() * h_hat;
  CMatrix p = h_hat * gram.ldlt().solve(CMatrix::Identity(gram.rows(), gram.cols()));
  const double per_stream = std::pow(pt, alpha) / static_cast<double>(h_hat.cols());
  for (Eigen::Index k = 0; k < p.cols(); ++k) {
    p.col(k) *= std::sqrt(per_stream) / p.col(k).norm();
  }
  return p;
}

CVector random_common_precoder(Rng& rng, int antennas, double power) {
  require(power >= 0, "random_common_precoder: negative power");
  return std::sqrt(power) * sample_unit_direction(rng, antennas);
}

Precoder constructive_scheme(const CMatrix& h_hat, double alpha, double pt, Rng& rng) {
  const CMatrix pp = zf_private_precoders(h_hat, alpha, pt);
  const double common = std::max(0.0, pt - std::pow(pt, alpha));
  return Precoder(random_common_precoder(rng, static_cast<int>(h_hat.rows()), common), pp);
}

SchemeExponents constructive_exponents(double alpha) {
  require(alpha >= 0 && alpha <= 1, "constructive_exponents: alpha must lie in [0,1]");
  return {alpha < 1 ? 1.0 : 0.0, alpha};
}

SchemeRates evaluate_scheme(const Precoder& p, const std::vector<ChannelInstance>& instances,
                            double sigma2, int n_samples, Rng& rng) {
  const int k_users = p.users();
  require(static_cast<int>(instances.size()) == k_users,
          "evaluate_scheme: need one region per user");
  SchemeRates out;
  out.priv.resize(k_users);
  out.r_c = std::numeric_limits<double>::infinity();
  for (int k = 0; k < k_users; ++k) {
    const auto& region = instances[k].region;
    out.priv[k] =
        worst_case_oracle(region, p, sigma2, k, Stream::Private, n_samples, rng).rate_min;
    out.r_c = std::min(
        out.r_c, worst_case_oracle(region, p, sigma2, k, Stream::Common, n_samples, rng).rate_min);
  }
  out.total.resize(k_users);
  for (int k = 0; k < k_users; ++k) out.total[k] = out.priv[k] + out.r_c / k_users;
  out.min_total = *std::min_element(out.total.begin(), out.total.end());
  return out;
}

double evaluate_scheme_minrate(const Precoder& p, const std::vector<ChannelInstance>& instances,
                               double sigma2, int n_samples, Rng& rng) {
  return evaluate_scheme(p, instances, sigma2, n_samples, rng).min_total;
}

DofEstimate dof_estimate(const std::vector<std::pair<double, double>>& points) {
  require(points.size() >= 3, "dof_estimate: need at least 3 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(points[i].first > 0 && std::isfinite(points[i].second),
            "dof_estimate: Pt must be positive and rates finite");
    if (i > 0) require(points[i].first > points[i - 1].first, "dof_estimate: Pt must increase");
  }
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [pt, r] : points) {
    mx += std::log2(pt);
    my += r;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [pt, r] : points) {
    const double dx = std::log2(pt) - mx;
    sxx += dx * dx;
    sxy += dx * (r - my);
    syy += (r - my) * (r - my);
  }
  if (!(sxx > 1e-12 * n)) throw DomainError("dof_estimate: degenerate abscissas");
  DofEstimate out;
  out.points = points;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return out;
}

DofPrediction theorem1_predictions(int users, double alpha) {
  if (users < 2) throw DomainError("theorem1_predictions: needs K >= 2");
  if (!(alpha >= 0 && alpha <= 1)) throw DomainError("theorem1_predictions: alpha outside [0,1]");
  const double k = users;
  return {alpha, (1.0 + (k - 1.0) * alpha) / k};
}

CMatrix estimate_matrix(const std::vector<ChannelInstance>& instances) {
  require(!instances.empty(), "estimate_matrix: no instances");
  const auto nt = instances.front().region.h_hat.size();
  CMatrix h(nt, static_cast<Eigen::Index>(instances.size()));
  for (std::size_t k = 0; k < instances.size(); ++k) {
    require(instances[k].region.h_hat.size() == nt, "estimate_matrix: dimension mismatch");
    h.col(static_cast<Eigen::Index>(k)) = instances[k].region.h_hat;
  }
  return h;
}

}  // namespace rsma

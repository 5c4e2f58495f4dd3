#include "rsma/wmse.h"

#include <cmath>
#include <numbers>

namespace rsma {

WmseState WmseState::unit(int users) {
  require(users >= 1, "WmseState: need at least one user");
  WmseState s;
  s.g_c = CVector::Zero(users);
  s.g = CVector::Zero(users);
  s.u_c = RVector::Ones(users);
  s.u = RVector::Ones(users);
  return s;
}

void WmseState::validate() const {
  const auto k = g.size();
  require(g_c.size() == k && u_c.size() == k && u.size() == k, "WmseState: size mismatch");
  require((u_c.array() > 0).all() && (u.array() > 0).all(),
          "WmseState: weights must be positive");
}

double wmse(double eps, double u) {
  if (!(u > 0)) throw DomainError("wmse: weight must be positive");
  return 1.0 + (u * eps - 1.0 - std::log(u)) / std::numbers::ln2;
}

double optimal_weight(double eps_mmse) {
  if (!(eps_mmse > 0)) throw DomainError("optimal_weight: MMSE must be positive");
  return 1.0 / eps_mmse;
}

IdentityResidual rate_wmse_identity_check(const CVector& h, const Precoder& p, double sigma2,
                                          int k) {
  const EqualizerPair g = mmse_equalizers(h, p, sigma2, k);
  const MsePair eps = mse_pair(h, p, g.common, g.priv, sigma2, k);
  const StreamMetrics m = sinr_and_rate(h, p, sigma2, k);
  IdentityResidual out;
  out.common = std::abs(wmse(eps.common, optimal_weight(eps.common)) - (1.0 - m.rate_c));
  out.priv = std::abs(wmse(eps.priv, optimal_weight(eps.priv)) - (1.0 - m.rate));
  return out;
}

double conservative_rate(double tau, Complex g, double u, double sigma2) {
  if (!(u > 0)) throw DomainError("conservative_rate: weight must be positive");
  return 1.0 - wmse(tau + std::norm(g) * sigma2, u);
}

double worst_case_residual(const CVector& h_hat, double delta, const CMatrix& m, Complex g,
                           int target) {
  require(m.rows() == h_hat.size(), "worst_case_residual: dimension mismatch");
  require(target >= 0 && target < m.cols(), "worst_case_residual: target out of range");
  require(delta >= 0, "worst_case_residual: delta must be nonnegative");
  // r(x)^H = a + C x with a = conj(g) M^H h_hat - e_j, C = conj(g) M^H.
  const CMatrix c = std::conj(g) * m.adjoint();
  CVector a = c * h_hat;
  a(target) -= 1.0;
  if (delta == 0.0 || c.norm() == 0.0) return a.squaredNorm();

  // max ||a + C x||^2 over ||x|| <= delta. With Q = C^H C = V diag(q) V^H and
  // beta = V^H C^H a, the maximizer is x = (mu I - Q)^{-1} C^H a for the root
  // mu > q_max of sum |beta_i|^2 / (mu - q_i)^2 = delta^2.
  Eigen::SelfAdjointEigenSolver<CMatrix> es(c.adjoint() * c);
  const RVector q = es.eigenvalues();
  const CMatrix& v = es.eigenvectors();
  const CVector beta = v.adjoint() * (c.adjoint() * a);
  const int n = static_cast<int>(q.size());
  const double qmax = q(n - 1);
  const double tie = 1e-12 * std::max(1.0, qmax);

  auto norm_sq = [&](double mu) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = mu - q(i);
      s += std::norm(beta(i)) / (d * d);
    }
    return s;
  };

  double top_weight = 0.0;
  for (int i = 0; i < n; ++i) {
    if (qmax - q(i) <= tie) top_weight += std::norm(beta(i));
  }

  CVector y(n);  // x in the eigenbasis
  if (top_weight <= 1e-30 * std::max(1.0, beta.squaredNorm())) {
    // Possible hard case: the secular function stays below delta^2 as mu
    // approaches q_max.
    double partial = 0.0;
    for (int i = 0; i < n; ++i) {
      if (qmax - q(i) > tie) partial += std::norm(beta(i)) / std::pow(qmax - q(i), 2);
    }
    if (partial <= delta * delta) {
      for (int i = 0; i < n; ++i) {
        y(i) = qmax - q(i) > tie ? beta(i) / (qmax - q(i)) : Complex(0.0);
      }
      y(n - 1) += std::sqrt(delta * delta - partial);
      const CVector x = v * y;
      return (a + c * x).squaredNorm();
    }
  }

  double lo = qmax;
  double hi = qmax + std::sqrt(beta.squaredNorm()) / delta + tie;
  while (norm_sq(hi) > delta * delta) hi = qmax + 2.0 * (hi - qmax);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (norm_sq(mid) > delta * delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  for (int i = 0; i < n; ++i) y(i) = beta(i) / (hi - q(i));
  // Put the point back on the sphere; bisection leaves it just inside.
  const double ny = y.norm();
  if (ny > 0.0) y *= delta / ny;
  const CVector x = v * y;
  return (a + c * x).squaredNorm();
}

double worst_case_mse(const UncertaintyRegion& region, const Precoder& p, double sigma2, int k,
                      Stream stream, Complex g) {
  require(k >= 0 && k < p.users(), "worst_case_mse: user index out of range");
  if (stream == Stream::Private) {
    return worst_case_residual(region.h_hat, region.delta, p.pp, g, k) + std::norm(g) * sigma2;
  }
  return worst_case_residual(region.h_hat, region.delta, p.full(), g, 0) + std::norm(g) * sigma2;
}

}  // namespace rsma

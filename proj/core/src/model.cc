#include "rsma/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rsma {

void SystemConfig::validate() const {
  require(users >= 1, "SystemConfig: K must be >= 1");
  require(antennas >= users, "SystemConfig: K must not exceed Nt");
  require(sigma2 > 0, "SystemConfig: sigma2 must be positive");
  require(power > 0, "SystemConfig: Pt must be positive");
}

Precoder::Precoder(CVector common, CMatrix priv) : pc(std::move(common)), pp(std::move(priv)) {
  require(pc.size() == pp.rows(), "Precoder: common and private columns differ in length");
}

Precoder Precoder::zeros(int antennas, int users) {
  return Precoder(CVector::Zero(antennas), CMatrix::Zero(antennas, users));
}

CMatrix Precoder::full() const {
  CMatrix out(pp.rows(), pp.cols() + 1);
  out.col(0) = pc;
  out.rightCols(pp.cols()) = pp;
  return out;
}

namespace {

void check_user(const CVector& h, const Precoder& p, double sigma2, int k) {
  require(h.size() == p.antennas(), "channel length does not match precoder rows");
  require(p.pc.size() == p.pp.rows(), "malformed precoder");
  require(k >= 0 && k < p.users(), "user index out of range");
  require(sigma2 > 0, "sigma2 must be positive");
}

}  // namespace

PowerTerms receive_powers(const CVector& h, const Precoder& p, double sigma2, int k) {
  check_user(h, p, sigma2, k);
  PowerTerms out;
  out.s_c = std::norm(h.dot(p.pc));  // h.dot(x) = h^H x
  double interference = sigma2;
  for (int j = 0; j < p.users(); ++j) {
    const double gain = std::norm(h.dot(p.pp.col(j)));
    if (j == k) {
      out.s = gain;
    } else {
      interference += gain;
    }
  }
  out.i = interference;
  out.t = out.s + out.i;
  out.i_c = out.t;
  out.t_c = out.s_c + out.t;
  return out;
}

MsePair mse_pair(const CVector& h, const Precoder& p, Complex g_c, Complex g, double sigma2,
                 int k) {
  const PowerTerms pw = receive_powers(h, p, sigma2, k);
  const Complex hc = h.dot(p.pc);
  const Complex hk = h.dot(p.pp.col(k));
  MsePair out;
  out.common = std::norm(g_c) * pw.t_c - 2.0 * std::real(g_c * hc) + 1.0;
  out.priv = std::norm(g) * pw.t - 2.0 * std::real(g * hk) + 1.0;
  return out;
}

EqualizerPair mmse_equalizers(const CVector& h, const Precoder& p, double sigma2, int k) {
  const PowerTerms pw = receive_powers(h, p, sigma2, k);
  // p^H h = conj(h^H p)
  return {std::conj(h.dot(p.pc)) / pw.t_c, std::conj(h.dot(p.pp.col(k))) / pw.t};
}

MsePair mmse_values(const CVector& h, const Precoder& p, double sigma2, int k) {
  const PowerTerms pw = receive_powers(h, p, sigma2, k);
  return {pw.i_c / pw.t_c, pw.i / pw.t};
}

StreamMetrics sinr_and_rate(const CVector& h, const Precoder& p, double sigma2, int k) {
  const PowerTerms pw = receive_powers(h, p, sigma2, k);
  StreamMetrics out;
  out.sinr_c = pw.s_c / pw.i_c;
  out.sinr = pw.s / pw.i;
  out.rate_c = std::log2(1.0 + out.sinr_c);
  out.rate = std::log2(1.0 + out.sinr);
  return out;
}

double common_rate(std::span<const double> rates_c) {
  require(!rates_c.empty(), "common_rate: empty rate vector");
  return *std::min_element(rates_c.begin(), rates_c.end());
}

void RateSplit::validate() const {
  for (double ck : c) {
    if (!(ck >= 0.0)) throw ContractError("RateSplit: negative common-rate portion");
  }
  const double sum = std::accumulate(c.begin(), c.end(), 0.0);
  if (std::abs(sum - r_c) > 1e-9) throw ContractError("RateSplit: portions do not sum to r_c");
}

std::vector<double> total_rates(std::span<const double> private_rates, const RateSplit& split) {
  split.validate();
  require(split.c.size() == private_rates.size(), "total_rates: split length differs from K");
  std::vector<double> out(private_rates.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = private_rates[k] + split.c[k];
  return out;
}

double precoder_power(const Precoder& p) { return p.pc.squaredNorm() + p.pp.squaredNorm(); }

}  // namespace rsma

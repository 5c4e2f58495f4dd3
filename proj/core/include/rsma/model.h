#pragma once

// Signal model of the K-user MISO downlink with one common and K private
// streams: receive-power decomposition, MSEs, MMSE equalizers, SINRs and
// rates. Rates are in bits/s/Hz, powers are linear.

#include <span>
#include <vector>

#include "rsma/types.h"

namespace rsma {

struct SystemConfig {
  int users = 1;         // K
  int antennas = 1;      // Nt
  double sigma2 = 1.0;   // noise variance
  double power = 1.0;    // transmit budget Pt

  void validate() const;
  double snr() const { return power / sigma2; }
};

/// P = [pc, p_1, ..., p_K]. NoRS designs keep pc at zero.
struct Precoder {
  CVector pc;
  CMatrix pp;

  Precoder() = default;
  Precoder(CVector common, CMatrix priv);
  static Precoder zeros(int antennas, int users);

  int antennas() const { return static_cast<int>(pp.rows()); }
  int users() const { return static_cast<int>(pp.cols()); }

  /// Nt x (K+1) matrix with the common column first.
  CMatrix full() const;
};

struct PowerTerms {
  double s_c = 0;  // |h^H pc|^2
  double s = 0;    // |h^H p_k|^2
  double i = 0;    // sum_{j != k} |h^H p_j|^2 + sigma2
  double i_c = 0;  // equals t
  double t = 0;    // s + i
  double t_c = 0;  // s_c + t
};

struct MsePair {
  double common = 0;
  double priv = 0;
};

struct EqualizerPair {
  Complex common;
  Complex priv;
};

struct StreamMetrics {
  double sinr_c = 0;
  double sinr = 0;
  double rate_c = 0;
  double rate = 0;
};

/// Per-user portions of the common rate.
struct RateSplit {
  std::vector<double> c;
  double r_c = 0;

  /// Throws ContractError unless every c_k >= 0 and sum c_k == r_c (1e-9).
  void validate() const;
};

// All per-user operations take a zero-based user index k.

PowerTerms receive_powers(const CVector& h, const Precoder& p, double sigma2, int k);

MsePair mse_pair(const CVector& h, const Precoder& p, Complex g_c, Complex g,
                 double sigma2, int k);

EqualizerPair mmse_equalizers(const CVector& h, const Precoder& p, double sigma2, int k);

MsePair mmse_values(const CVector& h, const Precoder& p, double sigma2, int k);

StreamMetrics sinr_and_rate(const CVector& h, const Precoder& p, double sigma2, int k);

/// R_c = min_j R_c,j. Throws on an empty input.
double common_rate(std::span<const double> rates_c);

std::vector<double> total_rates(std::span<const double> private_rates, const RateSplit& split);

/// tr(P P^H).
double precoder_power(const Precoder& p);

}  // namespace rsma

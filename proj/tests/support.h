#pragma once
// Small helpers shared by the unit tests.
#include <cmath>
#include <complex>

#include "rsma/model.h"
#include "rsma/rng.h"
#include "rsma/uncertainty.h"

namespace rsma::test {

inline CMatrix random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  CMatrix m(rows, cols);
  for (int c = 0; c < cols; ++c) m.col(c) = scale * sample_channel(rng, rows);
  return m;
}

inline Precoder random_precoder(Rng& rng, int antennas, int users, double power) {
  Precoder p(sample_channel(rng, antennas), random_matrix(rng, antennas, users));
  const double s = std::sqrt(power / precoder_power(p));
  p.pc *= s;
  p.pp *= s;
  return p;
}

// Minimizer of a unimodal function on [a, b].
template <class F>
double golden_section(F&& f, double a, double b, int iterations = 200) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace rsma::test

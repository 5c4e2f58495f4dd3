#pragma once

// CSIT error model: spherical uncertainty regions around channel estimates,
// the SNR scaling law of their radius, seeded channel/error generation and a
// sampling-based estimate of worst-case rates used for validation.

#include <vector>

#include "rsma/model.h"
#include "rsma/rng.h"
#include "rsma/types.h"

namespace rsma {

enum class ErrorMode { Interior, Boundary };
enum class Stream { Common, Private };

/// {h : ||h - h_hat|| <= delta}
struct UncertaintyRegion {
  CVector h_hat;
  double delta = 0.0;

  bool contains(const CVector& h, double slack = 1e-12) const;
};

/// delta(Pt) = delta0 * sqrt(scale * Pt^-alpha), i.e. delta^2 = O(Pt^-alpha).
struct RadiusLaw {
  double delta0 = 0.1;
  double alpha = 0.0;
  double scale = 1.0;

  void validate() const;
};

double radius_at(const RadiusLaw& law, double pt);

struct ChannelInstance {
  CVector h_true;
  UncertaintyRegion region;
};

/// i.i.d. CN(0,1) entries.
CVector sample_channel(Rng& rng, int antennas);

/// Uniformly distributed direction on the unit sphere of C^Nt.
CVector sample_unit_direction(Rng& rng, int antennas);

/// Interior: uniform over the ball of radius delta (2Nt real dimensions).
/// Boundary: uniform on the sphere of radius delta.
CVector sample_error(Rng& rng, double delta, ErrorMode mode, int antennas);

/// True channel h, error drawn in the ball, estimate h_hat = h - error.
ChannelInstance make_instance(Rng& rng, int antennas, double delta,
                              ErrorMode mode = ErrorMode::Interior);

/// Achievable rate of one stream of user k when the channel is h.
double stream_rate(const CVector& h, const Precoder& p, double sigma2, int k, Stream stream);

struct OracleResult {
  double rate_min = 0.0;
  CVector argmin_h;
};

/// Sampled upper estimate of min_{h in region} rate: the center, n_samples
/// draws (every tenth interior, the rest on the boundary sphere) and a
/// 50-step projected random-direction descent started from the best draw of
/// every power-of-ten prefix and of the full sample set. Draw i is
/// independent of n_samples, so the estimate never increases when the sample
/// count grows by a factor of ten. Advances `rng` by one word.
OracleResult worst_case_oracle(const UncertaintyRegion& region, const Precoder& p, double sigma2,
                               int k, Stream stream, int n_samples, Rng& rng);

}  // namespace rsma

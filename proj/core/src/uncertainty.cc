#include "rsma/uncertainty.h"

#include <cmath>

namespace rsma {

bool UncertaintyRegion::contains(const CVector& h, double slack) const {
  return (h - h_hat).norm() <= delta + slack;
}

void RadiusLaw::validate() const {
  require(delta0 > 0, "RadiusLaw: delta0 must be positive");
  require(alpha >= 0 && alpha <= 1, "RadiusLaw: alpha must lie in [0, 1]");
  require(scale > 0, "RadiusLaw: scale must be positive");
}

double radius_at(const RadiusLaw& law, double pt) {
  law.validate();
  require(pt > 0, "radius_at: Pt must be positive");
  return law.delta0 * std::sqrt(law.scale * std::pow(pt, -law.alpha));
}

CVector sample_channel(Rng& rng, int antennas) {
  require(antennas >= 1, "sample_channel: Nt must be >= 1");
  CVector h(antennas);
  const double scale = std::sqrt(0.5);
  for (int i = 0; i < antennas; ++i) {
    const auto [re, im] = rng.normal_pair();
    h(i) = Complex(scale * re, scale * im);
  }
  return h;
}

CVector sample_unit_direction(Rng& rng, int antennas) {
  CVector v = sample_channel(rng, antennas);
  double n = v.norm();
  while (n == 0.0) {
    v = sample_channel(rng, antennas);
    n = v.norm();
  }
  return v / n;
}

CVector sample_error(Rng& rng, double delta, ErrorMode mode, int antennas) {
  require(delta >= 0, "sample_error: delta must be nonnegative");
  CVector dir = sample_unit_direction(rng, antennas);
  double radius = delta;
  if (mode == ErrorMode::Interior) {
    radius = delta * std::pow(rng.uniform(), 1.0 / (2.0 * antennas));
  }
  return dir * radius;
}

ChannelInstance make_instance(Rng& rng, int antennas, double delta, ErrorMode mode) {
  ChannelInstance out;
  out.h_true = sample_channel(rng, antennas);
  const CVector err = sample_error(rng, delta, mode, antennas);
  out.region.h_hat = out.h_true - err;
  out.region.delta = delta;
  return out;
}

double stream_rate(const CVector& h, const Precoder& p, double sigma2, int k, Stream stream) {
  const StreamMetrics m = sinr_and_rate(h, p, sigma2, k);
  return stream == Stream::Common ? m.rate_c : m.rate;
}

namespace {

CVector project_to_ball(CVector x, double delta) {
  const double n = x.norm();
  if (n > delta) x *= delta / n;
  return x;
}

// Best point found so far, expressed as an error vector around h_hat.
struct Candidate {
  CVector err;
  double rate;
};

Candidate refine(const UncertaintyRegion& region, const Precoder& p, double sigma2, int k,
                 Stream stream, Candidate start, Rng rng) {
  const int nt = static_cast<int>(region.h_hat.size());
  double step = 0.25 * region.delta;
  for (int it = 0; it < 50; ++it) {
    const CVector d = sample_unit_direction(rng, nt);
    for (double sign : {1.0, -1.0}) {
      CVector trial = project_to_ball(start.err + sign * step * d, region.delta);
      const double r = stream_rate(region.h_hat + trial, p, sigma2, k, stream);
      if (r < start.rate) {
        start = {std::move(trial), r};
        step *= 1.5;
        break;
      }
      if (sign < 0) step *= 0.6;
    }
  }
  return start;
}

}  // namespace

OracleResult worst_case_oracle(const UncertaintyRegion& region, const Precoder& p, double sigma2,
                               int k, Stream stream, int n_samples, Rng& rng) {
  require(n_samples >= 1, "worst_case_oracle: n_samples must be >= 1");
  require(region.delta >= 0, "worst_case_oracle: negative radius");
  const int nt = static_cast<int>(region.h_hat.size());
  const std::uint64_t base = rng.next();

  Candidate best{CVector::Zero(nt), stream_rate(region.h_hat, p, sigma2, k, stream)};
  if (region.delta == 0.0) return {best.rate, region.h_hat};

  std::vector<std::pair<int, Candidate>> checkpoints;
  Rng sampler(hash_combine(base, 0));
  long long next_power = 1;
  for (int i = 0; i < n_samples; ++i) {
    const ErrorMode mode = (i % 10 == 9) ? ErrorMode::Interior : ErrorMode::Boundary;
    CVector err = sample_error(sampler, region.delta, mode, nt);
    const double r = stream_rate(region.h_hat + err, p, sigma2, k, stream);
    if (r < best.rate) best = {std::move(err), r};
    const int prefix = i + 1;
    if (prefix == next_power || prefix == n_samples) {
      checkpoints.emplace_back(prefix, best);
      if (prefix == next_power) next_power *= 10;
    }
  }

  Candidate overall = best;
  for (const auto& [prefix, start] : checkpoints) {
    Candidate refined = refine(region, p, sigma2, k, stream, start,
                               Rng(hash_combine(base, static_cast<std::uint64_t>(prefix))));
    if (refined.rate < overall.rate) overall = std::move(refined);
  }
  return {overall.rate, region.h_hat + overall.err};
}

}  // namespace rsma

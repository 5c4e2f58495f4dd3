#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rsma/uncertainty.h"
#include "rsma/wmse.h"
#include "support.h"

using namespace rsma;

TEST_SUITE("uncertainty") {

TEST_CASE("rng streams are reproducible and independent of draw order elsewhere") {
  Rng a = Rng::derive(42, 7), b = Rng::derive(42, 7), c = Rng::derive(42, 8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs = differs || x != c.next();
  }
  CHECK(differs);
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    const double v = r.uniform_open();
    CHECK((v > 0.0 && v <= 1.0));
  }
}

TEST_CASE("normal draws have unit variance") {
  Rng r(9);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n / 2; ++i) {
    const auto [x, y] = r.normal_pair();
    sum += x + y;
    sq += x * x + y * y;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("radius law") {
  const RadiusLaw law{0.1, 0.5, 10.0};
  CHECK(radius_at(law, 100.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(radius_at({0.2, 0.0, 1.0}, 1e6) == doctest::Approx(0.2));
  // delta^2 scales as Pt^-alpha
  const double r1 = radius_at({0.1, 0.6, 1.0}, 10.0), r2 = radius_at({0.1, 0.6, 1.0}, 1000.0);
  CHECK(std::log(r1 * r1 / (r2 * r2)) / std::log(100.0) == doctest::Approx(0.6));
  CHECK_THROWS(radius_at({0.1, 1.5, 1.0}, 10.0));
  CHECK_THROWS(radius_at({0.1, 0.5, 0.0}, 10.0));
}

TEST_CASE("error samples lie in the ball, boundary samples on the sphere") {
  Rng rng(4);
  std::vector<double> radii;
  for (int i = 0; i < 20000; ++i) {
    const CVector e = sample_error(rng, 0.3, ErrorMode::Interior, 3);
    CHECK(e.norm() <= 0.3 + 1e-15);
    radii.push_back(e.norm() / 0.3);
    const CVector b = sample_error(rng, 0.3, ErrorMode::Boundary, 3);
    CHECK(b.norm() == doctest::Approx(0.3).epsilon(1e-12));
  }
  // Uniform in a ball of real dimension 6: P(r <= x) = x^6.
  std::sort(radii.begin(), radii.end());
  CHECK(radii[radii.size() / 2] == doctest::Approx(std::pow(0.5, 1.0 / 6.0)).epsilon(0.01));
}

TEST_CASE("unit directions are isotropic") {
  Rng rng(17);
  RVector mean_sq = RVector::Zero(4);
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const CVector d = sample_unit_direction(rng, 4);
    CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-12));
    mean_sq += d.cwiseAbs2() / n;
  }
  for (int i = 0; i < 4; ++i) CHECK(mean_sq(i) == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("instances contain their true channel") {
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    const ChannelInstance inst = make_instance(rng, 3, 0.2);
    CHECK(inst.region.contains(inst.h_true));
    CHECK(inst.region.delta == 0.2);
    const ChannelInstance edge = make_instance(rng, 3, 0.2, ErrorMode::Boundary);
    CHECK((edge.h_true - edge.region.h_hat).norm() == doctest::Approx(0.2));
    CHECK(edge.region.contains(edge.h_true));
  }
  UncertaintyRegion r{CVector::Zero(2), 1.0};
  CVector far(2);
  far << 1.0, 0.1;
  CHECK_FALSE(r.contains(far));
}

TEST_CASE("sampled worst case sits between the certified bound and the nominal rate") {
  Rng rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    const ChannelInstance inst = make_instance(rng, 3, 0.15);
    const Precoder p = test::random_precoder(rng, 3, 3, 20.0);
    const int k = trial % 3;
    for (Stream s : {Stream::Private, Stream::Common}) {
      Rng oracle_rng(trial);
      const OracleResult o = worst_case_oracle(inst.region, p, 1.0, k, s, 500, oracle_rng);
      CHECK(inst.region.contains(o.argmin_h, 1e-9));
      CHECK(o.rate_min == doctest::Approx(stream_rate(o.argmin_h, p, 1.0, k, s)).epsilon(1e-12));
      CHECK(o.rate_min <= stream_rate(inst.region.h_hat, p, 1.0, k, s) + 1e-12);
      // Any fixed equalizer certifies a lower bound on the worst case.
      const EqualizerPair g = mmse_equalizers(inst.region.h_hat, p, 1.0, k);
      const Complex gs = s == Stream::Common ? g.common : g.priv;
      const double eps = worst_case_mse(inst.region, p, 1.0, k, s, gs);
      CHECK(-std::log2(eps) <= o.rate_min + 1e-9);
    }
  }
}

TEST_CASE("more oracle samples never raise the estimate") {
  Rng rng(2);
  const ChannelInstance inst = make_instance(rng, 3, 0.2);
  const Precoder p = test::random_precoder(rng, 3, 3, 50.0);
  double prev = INFINITY;
  for (int n : {10, 100, 1000, 10000}) {
    Rng r(77);
    const double v = worst_case_oracle(inst.region, p, 1.0, 1, Stream::Private, n, r).rate_min;
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

}  // TEST_SUITE

#include <cmath>

#include "doctest.h"
#include "rsma/model.h"
#include "support.h"

using namespace rsma;

TEST_SUITE("model") {

TEST_CASE("receive powers follow the stream decomposition") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int k_users = 2 + trial % 3;
    const CVector h = sample_channel(rng, k_users);
    const Precoder p = test::random_precoder(rng, k_users, k_users, 5.0);
    const double sigma2 = 0.3 + rng.uniform();
    for (int k = 0; k < k_users; ++k) {
      const PowerTerms t = receive_powers(h, p, sigma2, k);
      double interference = sigma2;
      for (int j = 0; j < k_users; ++j) {
        if (j != k) interference += std::norm(h.dot(p.pp.col(j)));
      }
      CHECK(t.s_c == doctest::Approx(std::norm(h.dot(p.pc))).epsilon(1e-12));
      CHECK(t.s == doctest::Approx(std::norm(h.dot(p.pp.col(k)))).epsilon(1e-12));
      CHECK(t.i == doctest::Approx(interference).epsilon(1e-12));
      CHECK(t.i_c == doctest::Approx(t.t).epsilon(1e-12));
      CHECK(t.t == doctest::Approx(t.s + t.i).epsilon(1e-12));
      CHECK(t.t_c == doctest::Approx(t.s_c + t.t).epsilon(1e-12));
    }
  }
}

TEST_CASE("single antenna, single user at unit SNR carries one bit") {
  CVector h(1);
  h << 1.0;
  const Precoder p(CVector::Zero(1), CMatrix::Ones(1, 1));
  const StreamMetrics m = sinr_and_rate(h, p, 1.0, 0);
  CHECK(m.sinr == doctest::Approx(1.0));
  CHECK(m.rate == doctest::Approx(1.0));
  CHECK(m.rate_c == doctest::Approx(0.0));
}

TEST_CASE("mmse equalizer minimizes the mse and gives 1/(1+sinr)") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const CVector h = sample_channel(rng, 3);
    const Precoder p = test::random_precoder(rng, 3, 3, 10.0);
    const int k = trial % 3;
    const EqualizerPair g = mmse_equalizers(h, p, 1.0, k);
    const MsePair best = mmse_values(h, p, 1.0, k);
    const MsePair at_g = mse_pair(h, p, g.common, g.priv, 1.0, k);
    CHECK(at_g.common == doctest::Approx(best.common).epsilon(1e-12));
    CHECK(at_g.priv == doctest::Approx(best.priv).epsilon(1e-12));
    const StreamMetrics m = sinr_and_rate(h, p, 1.0, k);
    CHECK(best.common == doctest::Approx(1.0 / (1.0 + m.sinr_c)).epsilon(1e-12));
    CHECK(best.priv == doctest::Approx(1.0 / (1.0 + m.sinr)).epsilon(1e-12));
    CHECK(m.rate == doctest::Approx(std::log2(1.0 + m.sinr)).epsilon(1e-12));
    for (int j = 0; j < 10; ++j) {
      const Complex d(0.1 * (rng.uniform() - 0.5), 0.1 * (rng.uniform() - 0.5));
      const MsePair off = mse_pair(h, p, g.common + d, g.priv + d, 1.0, k);
      CHECK(off.common >= best.common - 1e-12);
      CHECK(off.priv >= best.priv - 1e-12);
    }
  }
}

TEST_CASE("mse expands as |g|^2 T - 2 Re(g h^H p) + 1") {
  Rng rng(8);
  const CVector h = sample_channel(rng, 2);
  const Precoder p = test::random_precoder(rng, 2, 2, 3.0);
  const Complex g(0.3, -0.7);
  const PowerTerms t = receive_powers(h, p, 0.5, 1);
  const MsePair e = mse_pair(h, p, g, g, 0.5, 1);
  CHECK(e.priv == doctest::Approx(std::norm(g) * t.t - 2.0 * (g * h.dot(p.pp.col(1))).real() + 1.0));
  CHECK(e.common == doctest::Approx(std::norm(g) * t.t_c - 2.0 * (g * h.dot(p.pc)).real() + 1.0));
}

TEST_CASE("precoder layout and power") {
  Rng rng(3);
  const Precoder p = test::random_precoder(rng, 3, 2, 4.0);
  const CMatrix full = p.full();
  CHECK(full.cols() == 3);
  CHECK((full.col(0) - p.pc).norm() == 0.0);
  CHECK((full.col(2) - p.pp.col(1)).norm() == 0.0);
  CHECK(precoder_power(p) == doctest::Approx(4.0));
  CHECK(precoder_power(Precoder::zeros(3, 2)) == 0.0);
}

TEST_CASE("common rate and rate split") {
  const std::vector<double> rc{2.0, 1.5, 3.0};
  CHECK(common_rate(rc) == 1.5);
  CHECK_THROWS_AS(common_rate(std::vector<double>{}), ContractError);

  RateSplit split{{0.5, 1.0}, 1.5};
  CHECK_NOTHROW(split.validate());
  const auto total = total_rates(std::vector<double>{1.0, 2.0}, split);
  CHECK(total[0] == 1.5);
  CHECK(total[1] == 3.0);

  RateSplit negative{{-0.1, 1.6}, 1.5};
  CHECK_THROWS_AS(negative.validate(), ContractError);
  RateSplit short_sum{{0.5, 0.5}, 1.5};
  CHECK_THROWS_AS(short_sum.validate(), ContractError);
}

TEST_CASE("system config validation") {
  SystemConfig c;
  c.users = 3;
  c.antennas = 3;
  c.power = 100.0;
  CHECK_NOTHROW(c.validate());
  CHECK(c.snr() == 100.0);
  c.sigma2 = 0.0;
  CHECK_THROWS(c.validate());
}

}  // TEST_SUITE

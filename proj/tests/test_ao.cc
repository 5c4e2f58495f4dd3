#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "rsma/ao.h"
#include "support.h"

using namespace rsma;

namespace {

DesignSpec random_spec(std::uint64_t seed, int users, double delta, Strategy s = Strategy::RS) {
  Rng rng(seed);
  DesignSpec spec;
  spec.strategy = s;
  for (int k = 0; k < users; ++k) spec.regions.push_back(make_instance(rng, users, delta).region);
  return spec;
}

bool non_decreasing(const std::vector<double>& v, double tol) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1] - tol) return false;
  }
  return true;
}

bool non_increasing(const std::vector<double>& v, double tol) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] + tol) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("ao") {

TEST_CASE("max-min split against a grid search") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> r{3.0 * rng.uniform(), 3.0 * rng.uniform()};
    const double rc = 2.0 * rng.uniform();
    const RateSplit s = max_min_split(r, rc);
    CHECK_NOTHROW(s.validate());
    const double got = std::min(r[0] + s.c[0], r[1] + s.c[1]);
    double best = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double c0 = rc * i / 10000.0;
      best = std::max(best, std::min(r[0] + c0, r[1] + rc - c0));
    }
    CHECK(got >= best - 1e-9);
    CHECK(got <= best + rc / 10000.0 + 1e-12);
  }
  const RateSplit zero = max_min_split(std::vector<double>{1.0, 2.0, 0.5}, 0.0);
  CHECK(std::accumulate(zero.c.begin(), zero.c.end(), 0.0) == 0.0);
  CHECK_THROWS_AS(max_min_split(std::vector<double>{1.0}, -1.0), ContractError);
}

TEST_CASE("water filling lifts the weakest users to a common level") {
  const RateSplit s = max_min_split(std::vector<double>{1.0, 2.0, 4.0}, 2.0);
  CHECK(s.c[0] == doctest::Approx(1.5));
  CHECK(s.c[1] == doctest::Approx(0.5));
  CHECK(s.c[2] == doctest::Approx(0.0));
}

TEST_CASE("equalizer step without uncertainty is the mmse receiver") {
  Rng rng(7);
  for (int trial = 0; trial < 6; ++trial) {
    const CVector h = sample_channel(rng, 3);
    const Precoder p = test::random_precoder(rng, 3, 3, 10.0);
    const UncertaintyRegion region{h, 0.0};
    const int k = trial % 3;
    const EqualizerStepResult pr = equalizer_step(region, p, 1.0, k, Stream::Private);
    const EqualizerStepResult co = equalizer_step(region, p, 1.0, k, Stream::Common);
    REQUIRE(pr.status == SolveStatus::Optimal);
    const MsePair e = mmse_values(h, p, 1.0, k);
    const EqualizerPair g = mmse_equalizers(h, p, 1.0, k);
    CHECK(pr.eps_cons == doctest::Approx(e.priv).epsilon(1e-6));
    CHECK(co.eps_cons == doctest::Approx(e.common).epsilon(1e-6));
    CHECK(std::abs(pr.g - g.priv) <= 1e-4 * (1.0 + std::abs(g.priv)));
  }
}

TEST_CASE("robust equalizer certifies its worst-case mse") {
  Rng rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    const ChannelInstance inst = make_instance(rng, 3, 0.15);
    const Precoder p = test::random_precoder(rng, 3, 3, 30.0);
    const EqualizerStepResult r = equalizer_step(inst.region, p, 1.0, 0, Stream::Private);
    REQUIRE(r.status == SolveStatus::Optimal);
    const double exact = worst_case_mse(inst.region, p, 1.0, 0, Stream::Private, r.g);
    CHECK(exact == doctest::Approx(r.eps_cons).epsilon(1e-5));
  }
}

TEST_CASE("weight step") {
  CHECK(weight_step(0.25) == 4.0);
  CHECK_THROWS_AS(weight_step(0.0), DomainError);
}

TEST_CASE("single antenna, single user without uncertainty reaches log2(1 + Pt)") {
  DesignSpec spec;
  spec.strategy = Strategy::NoRS;
  CVector h(1);
  h << Complex(0.6, 0.8);
  spec.regions.push_back({h, 0.0});
  for (double pt : {1.0, 10.0, 100.0}) {
    const DesignResult r = run_ao(spec, Objective::max_min_rate(pt));
    CHECK(r.status == AoStatus::Converged);
    CHECK(r.objective == doctest::Approx(std::log2(1.0 + pt)).epsilon(1e-3).scale(1.0));
  }
}

TEST_CASE("rate design: monotone trace, budget respected, rates certified") {
  for (std::uint64_t seed : {1u, 2u}) {
    const DesignSpec spec = random_spec(seed, 3, 0.1);
    const double pt = 100.0;
    const DesignResult r = run_ao(spec, Objective::max_min_rate(pt));
    CHECK(r.status != AoStatus::SolverFailure);
    CHECK(non_decreasing(r.trace, 1e-8));
    CHECK(precoder_power(r.precoder) <= pt * (1.0 + 1e-6));
    CHECK(r.objective == doctest::Approx(r.trace.back()));
    const double min_rate =
        *std::min_element(r.per_user_conservative_rates.begin(), r.per_user_conservative_rates.end());
    CHECK(min_rate == doctest::Approx(r.objective).epsilon(1e-9));
    for (int k = 0; k < 3; ++k) {
      Rng o(seed * 10 + k);
      const double rp =
          worst_case_oracle(spec.regions[k], r.precoder, 1.0, k, Stream::Private, 300, o).rate_min;
      const double rc =
          worst_case_oracle(spec.regions[k], r.precoder, 1.0, k, Stream::Common, 300, o).rate_min;
      CHECK(r.per_user_conservative_rates[k] <= rp + r.split.c[k] + 1e-6);
      CHECK(r.common_rates[k] <= rc + 1e-6);
    }
  }
}

TEST_CASE("paired design: rate splitting never loses") {
  const DesignSpec spec = random_spec(5, 3, 0.1);
  const PairedDesign pd = design_paired(spec, Objective::max_min_rate(300.0));
  CHECK(pd.rs.objective >= pd.nors.objective - 1e-9);
  CHECK(pd.nors.precoder.pc.norm() == 0.0);
}

TEST_CASE("warm start from a converged design does not fall back") {
  const DesignSpec spec = random_spec(6, 2, 0.05, Strategy::NoRS);
  const DesignResult first = run_ao(spec, Objective::max_min_rate(50.0));
  AoConfig cfg;
  cfg.init = InitStrategy::warm_start(first.precoder, first.wmse_state);
  const DesignResult second = run_ao(spec, Objective::max_min_rate(50.0), cfg);
  CHECK(second.trace.front() >= first.objective - 1e-6);
  CHECK(second.objective >= first.objective - 1e-6);
}

TEST_CASE("power design: monotone trace and target met") {
  const DesignSpec spec = random_spec(9, 2, 0.05);
  const double target = 2.0;
  const DesignResult r = run_ao(spec, Objective::min_power(target));
  REQUIRE(r.status != AoStatus::Infeasible);
  CHECK(non_increasing(r.trace, 1e-8));
  CHECK(r.objective == doctest::Approx(precoder_power(r.precoder)).epsilon(1e-9));
  const Evaluation ev = evaluate_design(spec, r.precoder, r.wmse_state);
  CHECK(ev.min_total >= target - 1e-6);
}

TEST_CASE("zero rate target needs zero power") {
  const DesignSpec spec = random_spec(3, 2, 0.1);
  const DesignResult r = run_ao(spec, Objective::min_power(0.0));
  CHECK(r.status == AoStatus::Converged);
  CHECK(r.objective == 0.0);
  CHECK(precoder_power(r.precoder) == 0.0);
  CHECK(bootstrap_power_problem(0.0, spec).feasible);
}

TEST_CASE("initial precoders use the whole budget") {
  const DesignSpec spec = random_spec(4, 3, 0.1);
  CHECK(precoder_power(mrt_init(spec, 20.0)) == doctest::Approx(20.0));
  CHECK(precoder_power(zf_init(spec, 20.0)) == doctest::Approx(20.0));
  const DesignSpec nors = restrict_nors(spec);
  CHECK(nors.strategy == Strategy::NoRS);
  Precoder base = mrt_init(nors, 20.0);
  const Precoder e = embed_nors(spec, base, 20.0, 0.01);
  CHECK(precoder_power(e) <= 20.0 * (1.0 + 1e-12));
  CHECK(e.pc.squaredNorm() == doctest::Approx(0.2));
}

TEST_CASE("design and config validation") {
  DesignSpec spec = random_spec(1, 2, 0.1);
  spec.regions[1].delta = -1.0;
  CHECK_THROWS_AS(spec.validate(), ContractError);
  DesignSpec one = random_spec(1, 1, 0.1);
  CHECK_THROWS_AS(one.validate(), ContractError);  // RS with one user
  AoConfig cfg;
  cfg.tol_rel = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ContractError);
  CHECK_THROWS_AS(run_ao(random_spec(1, 2, 0.1), Objective::min_power(-1.0)), ContractError);
}

TEST_CASE("precoder problems are well formed") {
  const DesignSpec spec = random_spec(11, 3, 0.1);
  const WmseState st = WmseState::unit(3);
  const ConicProblem rate = build_rate_problem(spec, st, 10.0);
  const ConicProblem power = build_power_problem(spec, st, 1.0);
  CHECK_NOTHROW(rate.validate());
  CHECK_NOTHROW(power.validate());
  CHECK(rate.lmis.size() >= 6);  // private and common S-procedure blocks
  const DesignSpec nors = restrict_nors(spec);
  const ConicProblem np = build_rate_problem(nors, st, 10.0);
  CHECK(np.lmis.size() == 3);
  for (const auto& l : np.lmis) CHECK(l.dim == 1 + 3 + 3);
}

TEST_CASE("rate splitting with the common column pinned to zero is the conventional design") {
  DesignSpec rs = random_spec(12, 2, 0.1);
  rs.zero_common = true;
  const DesignSpec nors = restrict_nors(rs);
  // Same equalizers and weights: the precoder programs have the same value.
  const DesignResult start = run_ao(nors, Objective::max_min_rate(30.0), [] {
    AoConfig c;
    c.max_iter = 1;
    return c;
  }());
  const PrecoderStepResult a = precoder_step_rate(rs, start.wmse_state, 30.0);
  const PrecoderStepResult b = precoder_step_rate(nors, start.wmse_state, 30.0);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-6));
  CHECK(a.precoder.pc.norm() == 0.0);
  // Whole runs can take different paths through ties among non-binding
  // users, so they agree only to the stopping tolerance.
  const DesignResult ra = run_ao(rs, Objective::max_min_rate(30.0));
  const DesignResult rb = run_ao(nors, Objective::max_min_rate(30.0));
  CHECK(ra.objective == doctest::Approx(rb.objective).epsilon(1e-4));
}

}  // TEST_SUITE

#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "rsma/config.h"
#include "rsma/csv.h"
#include "rsma/experiment.h"

using namespace rsma;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

ExperimentConfig tiny_maxmin() {
  return parse_config_text(R"({
    "kind": "maxmin", "id": "tiny", "K": 2, "Nt": 2,
    "snr_db": [10, 20], "delta": 0.05, "channels": 2, "seed": 99
  })");
}

ResultRow sample_row() {
  ResultRow r;
  r.experiment = "x";
  r.channel = 3;
  r.seed = 18446744073709551615ull;
  r.snr_db = 20.0;
  r.delta = 0.1;
  r.scheme = "RS";
  r.status = "Converged";
  r.objective = 1.0 / 3.0;
  r.rates = {0.1, 0.2};
  r.common_rate = 0.3;
  r.iterations = 7;
  return r;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("minimal config gets the defaults") {
  const ExperimentConfig c = parse_config_text(R"({"kind": "maxmin", "snr_db": [10]})");
  CHECK(c.kind == ExperimentKind::MaxMinSweep);
  CHECK(c.id == "maxmin");
  CHECK(c.users == 3);
  CHECK(c.antennas == 3);
  CHECK(c.channels == 20);
  CHECK(std::get<double>(c.delta) == 0.1);
  CHECK(c.radius(100.0) == 0.1);
}

TEST_CASE("radius law config") {
  const ExperimentConfig c = parse_config_text(
      R"({"kind": "maxmin", "snr_db": [20], "delta": {"delta0": 0.1, "alpha": 0.5, "scale": 10}})");
  CHECK(c.radius(100.0) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("unknown and missing keys name their line") {
  CHECK(error_line("{\n  \"kind\": \"maxmin\",\n  \"snr_db\": [1],\n  \"chanels\": 3\n}") == 4);
  CHECK(error_line("{\n  \"snr_db\": [1]\n}") == 1);
  CHECK(error_line("{\n  \"kind\": \"maxmin\",\n  \"snr_db\": [1],\n  \"K\": 4\n}") == 4);
  CHECK(error_line("{\n  \"kind\": \"maxmin\",\n  \"snr_db\": [1],\n  \"ao\": {\"tol\": 1}\n}") == 4);
  CHECK(error_line("{\n  \"kind\": \"maxmin\",\n  \"snr_db\": [1,]\n}") == 3);
  CHECK(error_line("{\"kind\": \"minpower\", \"delta\": 0.1}") == 1);
  CHECK_THROWS_WITH_AS(parse_config_text("{\"kind\": \"maxmin\", \"snr_db\": [1], \"x\": 1}", "f.json"),
                       "f.json:1: unknown key 'x'", ConfigError);
}

TEST_CASE("type and range errors") {
  CHECK_THROWS_AS(parse_config_text(R"({"kind": "maxmin", "snr_db": [1], "K": 2.5})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"kind": "maxmin", "snr_db": [1], "seed": -1})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"kind": "maxmin", "snr_db": [1], "delta": -0.1})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"kind": "maxmin", "snr_db": [1], "delta": {"delta0": 0.1}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"kind": "sweep", "snr_db": [1]})"), ConfigError);
  CHECK_THROWS_AS(
      parse_config_text(R"({"kind": "dof", "snr_db": [20, 30, 40], "delta": 0.1})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"kind": "maxmin", "snr_db": [1], "ao": {"init": "svd"}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("configs survive a serialize/parse round trip") {
  const char* texts[] = {
      R"({"kind": "maxmin", "snr_db": [5, 10], "delta": {"delta0": 0.1, "alpha": 0.5, "scale": 10},
          "seed": 12345678901234, "ao": {"init": "zf", "solver": {"tol": 1e-8}}})",
      R"({"kind": "minpower", "target_rate": 3.3219, "delta_grid": [0.05, 0.1], "channels": 5,
          "ao": {"bootstrap_p0": 2.5}})",
      R"({"kind": "dof", "snr_db": [20, 30, 40, 50], "delta": {"alpha": 1}, "dof_fit_points": 3,
          "oracle_samples": 100, "record_timing": true})"};
  for (const char* t : texts) {
    const ExperimentConfig c = parse_config_text(t);
    const ExperimentConfig back = parse_config_text(serialize_config(c));
    CHECK(back == c);
    CHECK(serialize_config(back) == serialize_config(c));
  }
}

TEST_CASE("csv round trip keeps every field") {
  ResultRow a = sample_row();
  ResultRow b = sample_row();
  b.snr_db = ResultRow::kNaN;
  b.objective = ResultRow::kNaN;
  b.scheme = "NoRS";
  b.status = "Infeasible";
  std::stringstream ss;
  write_csv(ss, {a, b});
  const std::string text = ss.str();
  CHECK(text.substr(0, text.find('\n')) ==
        "experiment,channel,seed,snr_db,delta,scheme,status,objective,rate_user1,rate_user2,"
        "common_rate,iterations,wall_time_ms");
  const auto rows = read_csv(ss);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].seed == a.seed);
  CHECK(rows[0].objective == a.objective);
  CHECK(rows[0].rates == a.rates);
  CHECK(rows[0].iterations == 7);
  CHECK(std::isnan(rows[1].snr_db));
  CHECK(std::isnan(rows[1].objective));
  CHECK(rows[1].status == "Infeasible");
  std::stringstream again;
  write_csv(again, rows);
  CHECK(again.str() == text);
}

TEST_CASE("csv edge cases") {
  std::stringstream one;
  write_csv(one, {sample_row()});
  std::string line;
  int lines = 0;
  while (std::getline(one, line)) ++lines;
  CHECK(lines == 2);
  CHECK_THROWS_AS(emit_csv({}, "/tmp/never_written.csv"), ContractError);
  CHECK_THROWS_AS(emit_csv({sample_row()}, "/nonexistent/dir/out.csv"), IoError);
  std::stringstream bad("experiment,channel\n");
  CHECK_THROWS_AS(read_csv(bad), IoError);
}

TEST_CASE("sweeps are deterministic and independent of the thread count") {
  const ExperimentConfig c = tiny_maxmin();
  const ExperimentResult a = run_experiment(c, 1);
  const ExperimentResult b = run_experiment(c, 3);
  std::stringstream sa, sb;
  write_csv(sa, a.rows);
  write_csv(sb, b.rows);
  CHECK(sa.str() == sb.str());
  CHECK(a.rows.size() == 2 * 2 * 2);
  CHECK(a.solves == 8);
  for (std::size_t i = 0; i + 1 < a.rows.size(); i += 2) {
    CHECK(a.rows[i].scheme == "NoRS");
    CHECK(a.rows[i + 1].scheme == "RS");
    CHECK(a.rows[i + 1].objective >= a.rows[i].objective - 1e-9);
    CHECK(a.rows[i].wall_time_ms == 0.0);
  }
  const auto summary = nlohmann::json::parse(summary_json(c, a));
  CHECK(summary["points"].size() == 4);
  CHECK(summary["experiment"] == "tiny");
}

TEST_CASE("scalar channel without uncertainty reaches the capacity") {
  const ExperimentConfig c = parse_config_text(R"({
    "kind": "maxmin", "K": 1, "Nt": 1, "snr_db": [0, 10, 20], "delta": 0, "channels": 3
  })");
  const ExperimentResult r = run_experiment(c);
  for (const auto& row : r.rows) {
    // |h|^2 varies per channel; the rate is log2(1 + |h|^2 Pt).
    const auto draw = draw_channel(c.seed, row.channel, 1, 1);
    const double gain = draw.h[0].squaredNorm();
    CHECK(row.objective == doctest::Approx(std::log2(1.0 + gain * db_to_linear(row.snr_db)))
                               .epsilon(1e-3)
                               .scale(1.0));
  }
}

TEST_CASE("power sweep with a zero target uses no power") {
  const ExperimentConfig c = parse_config_text(R"({
    "kind": "minpower", "K": 2, "Nt": 2, "target_rate": 0, "delta_grid": [0.05, 0.1], "channels": 2
  })");
  const ExperimentResult r = run_experiment(c);
  CHECK(r.rows.size() == 8);
  for (const auto& row : r.rows) {
    CHECK(row.objective == 0.0);
    CHECK(std::isnan(row.snr_db));
  }
  const auto summary = nlohmann::json::parse(summary_json(c, r));
  CHECK(summary.contains("both_feasible"));
}

TEST_CASE("dof sweep reports fits for both schemes") {
  const ExperimentConfig c = parse_config_text(R"({
    "kind": "dof", "snr_db": [20, 30, 40, 50], "delta": {"delta0": 0.1, "alpha": 1},
    "channels": 2, "oracle_samples": 50, "dof_fit_points": 3
  })");
  const ExperimentResult r = run_experiment(c);
  CHECK(r.rows.size() == 2 * 4 * 2);
  REQUIRE(r.fits.size() == 2);
  CHECK(r.fits[0].estimate.points.size() == 3);
  CHECK(r.fits[0].predicted == 1.0);
  CHECK(r.solves == 0);
  const auto summary = nlohmann::json::parse(summary_json(c, r));
  CHECK(summary["fits"].size() == 2);
}

TEST_CASE("channel draws share error directions across radii") {
  const ChannelDraw d = draw_channel(5, 2, 3, 3);
  const auto a = d.at(0.1), b = d.at(0.2);
  for (int k = 0; k < 3; ++k) {
    CHECK((a[k].h_true - b[k].h_true).norm() == 0.0);
    CHECK((a[k].h_true - a[k].region.h_hat).norm() <= 0.1 + 1e-15);
    const CVector ea = a[k].h_true - a[k].region.h_hat, eb = b[k].h_true - b[k].region.h_hat;
    CHECK((2.0 * ea - eb).norm() <= 1e-14);
  }
  CHECK(db_to_linear(20.0) == doctest::Approx(100.0));
}

}  // TEST_SUITE

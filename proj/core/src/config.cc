#include "rsma/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rsma {

using nlohmann::json;

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::MaxMinSweep: return "MaxMinSweep";
    case ExperimentKind::PowerFeasibility: return "PowerFeasibility";
    case ExperimentKind::DofSweep: return "DofSweep";
  }
  return "Unknown";
}

const char* keyword(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::MaxMinSweep: return "maxmin";
    case ExperimentKind::PowerFeasibility: return "minpower";
    case ExperimentKind::DofSweep: return "dof";
  }
  return "unknown";
}

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(message), line_(line) {}

double ExperimentConfig::radius(double pt) const {
  if (const auto* d = std::get_if<double>(&delta)) return *d;
  return radius_at(std::get<RadiusLaw>(delta), pt);
}

std::vector<double> ExperimentConfig::power_deltas() const {
  if (!delta_grid.empty()) return delta_grid;
  if (const auto* d = std::get_if<double>(&delta)) return {*d};
  return {};
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (users < 1) fail("K must be >= 1");
  if (antennas < users) fail("K must not exceed Nt");
  if (!(sigma2 > 0)) fail("sigma2 must be positive");
  if (channels < 1) fail("channels must be >= 1");
  if (oracle_samples < 1) fail("oracle_samples must be >= 1");
  for (double s : snr_db) {
    if (!std::isfinite(s)) fail("snr_db entries must be finite");
  }
  if (const auto* d = std::get_if<double>(&delta)) {
    if (!(*d >= 0)) fail("delta must be nonnegative");
  } else {
    const auto& law = std::get<RadiusLaw>(delta);
    if (!(law.delta0 > 0) || !(law.alpha >= 0 && law.alpha <= 1) || !(law.scale > 0)) {
      fail("delta law needs delta0 > 0, alpha in [0,1] and scale > 0");
    }
  }
  for (double d : delta_grid) {
    if (!(d >= 0)) fail("delta_grid entries must be nonnegative");
  }
  try {
    ao.validate();
  } catch (const ContractError& e) {
    fail(std::string("ao: ") + e.what());
  }
  switch (kind) {
    case ExperimentKind::MaxMinSweep:
      if (snr_db.empty()) fail("snr_db must be nonempty");
      break;
    case ExperimentKind::PowerFeasibility:
      if (!(target_rate >= 0)) fail("target_rate must be nonnegative");
      if (power_deltas().empty()) fail("delta_grid is required when delta is a law");
      break;
    case ExperimentKind::DofSweep:
      if (snr_db.size() < 3) fail("snr_db needs at least 3 points for dof");
      if (!std::holds_alternative<RadiusLaw>(delta)) fail("delta must be a law for dof");
      if (users < 2) fail("K must be >= 2 for dof");
      for (double snr : snr_db) {
        if (sigma2 * std::pow(10.0, snr / 10.0) < 1.0) fail("snr_db must give Pt >= 1 for dof");
      }
      if (dof_fit_points < 3 || dof_fit_points > static_cast<int>(snr_db.size())) {
        fail("dof_fit_points must lie in [3, number of snr_db points]");
      }
      if (!std::is_sorted(snr_db.begin(), snr_db.end()) ||
          std::adjacent_find(snr_db.begin(), snr_db.end()) != snr_db.end()) {
        fail("snr_db must be strictly increasing for dof");
      }
      break;
  }
}

namespace {

// First line on which the keys of `path` appear in order. Good enough to
// anchor messages; the document has already parsed.
int line_of(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const auto& key : path) {
    const std::size_t at = text.find('"' + key + '"', pos);
    if (at == std::string::npos) break;
    pos = at + 1;
  }
  if (path.empty()) return 1;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

std::string join(const std::vector<std::string>& path) {
  std::string out;
  for (const auto& p : path) out += (out.empty() ? "" : ".") + p;
  return out;
}

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const {
    const int line = line_of(text_, path);
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + message, line);
  }

  void check_keys(const json& obj, const std::vector<std::string>& path,
                  const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(path, "'" + join(path) + "' must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!allowed.count(it.key())) {
        auto p = path;
        p.push_back(it.key());
        fail(p, "unknown key '" + join(p) + "'");
      }
    }
  }

  double number(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number()) fail(path, "'" + join(path) + "' must be a number");
    return v.get<double>();
  }

  int integer(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number_integer()) fail(path, "'" + join(path) + "' must be an integer");
    return v.get<int>();
  }

  std::uint64_t seed(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number_unsigned()) fail(path, "'" + join(path) + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  std::vector<double> numbers(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_array()) fail(path, "'" + join(path) + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, path));
    return out;
  }

 private:
  const std::string& text_;
  std::string source_;
};

SolverOptions read_solver(const Reader& r, const json& j, const std::vector<std::string>& path) {
  r.check_keys(j, path, {"tol", "feastol", "max_iter"});
  SolverOptions o;
  auto at = [&](const char* k) {
    auto p = path;
    p.push_back(k);
    return p;
  };
  if (j.contains("tol")) o.tol = r.number(j["tol"], at("tol"));
  if (j.contains("feastol")) o.feastol = r.number(j["feastol"], at("feastol"));
  if (j.contains("max_iter")) o.max_iter = r.integer(j["max_iter"], at("max_iter"));
  if (!(o.tol > 0) || !(o.feastol > 0) || o.max_iter < 1) {
    r.fail(path, "solver tolerances must be positive and max_iter >= 1");
  }
  return o;
}

AoConfig read_ao(const Reader& r, const json& j) {
  const std::vector<std::string> path{"ao"};
  r.check_keys(j, path,
               {"tol_rel", "max_iter", "bootstrap_max", "bootstrap_iterations", "bootstrap_p0",
                "init", "solver"});
  AoConfig ao;
  auto at = [&](const char* k) { return std::vector<std::string>{"ao", k}; };
  if (j.contains("tol_rel")) ao.tol_rel = r.number(j["tol_rel"], at("tol_rel"));
  if (j.contains("max_iter")) ao.max_iter = r.integer(j["max_iter"], at("max_iter"));
  if (j.contains("bootstrap_max")) {
    ao.bootstrap_max = r.integer(j["bootstrap_max"], at("bootstrap_max"));
  }
  if (j.contains("bootstrap_iterations")) {
    ao.bootstrap_iterations = r.integer(j["bootstrap_iterations"], at("bootstrap_iterations"));
  }
  if (j.contains("bootstrap_p0")) ao.bootstrap_p0 = r.number(j["bootstrap_p0"], at("bootstrap_p0"));
  if (j.contains("init")) {
    const auto& v = j["init"];
    if (v == "mrt") {
      ao.init.kind = InitStrategy::Kind::MrtEqualSplit;
    } else if (v == "zf") {
      ao.init.kind = InitStrategy::Kind::ZfEqualSplit;
    } else {
      r.fail(at("init"), "'ao.init' must be \"mrt\" or \"zf\"");
    }
  }
  if (j.contains("solver")) ao.solver = read_solver(r, j["solver"], at("solver"));
  return ao;
}

json write_ao(const AoConfig& ao) {
  json j;
  j["tol_rel"] = ao.tol_rel;
  j["max_iter"] = ao.max_iter;
  j["bootstrap_max"] = ao.bootstrap_max;
  j["bootstrap_iterations"] = ao.bootstrap_iterations;
  if (ao.bootstrap_p0) j["bootstrap_p0"] = *ao.bootstrap_p0;
  j["init"] = ao.init.kind == InitStrategy::Kind::ZfEqualSplit ? "zf" : "mrt";
  j["solver"] = {{"tol", ao.solver.tol},
                 {"feastol", ao.solver.feastol},
                 {"max_iter", ao.solver.max_iter}};
  return j;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line =
        1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ConfigError(source + ":" + std::to_string(line) + ": malformed JSON", line);
  }
  const Reader r(text, source);
  r.check_keys(j, {},
               {"kind", "id", "K", "Nt", "sigma2", "snr_db", "delta", "delta_grid", "channels",
                "seed", "target_rate", "oracle_samples", "dof_fit_points", "record_timing",
                "ao"});
  if (!j.contains("kind")) r.fail({}, "missing required key 'kind'");
  ExperimentConfig c;
  const auto& kind = j["kind"];
  if (kind == "maxmin") {
    c.kind = ExperimentKind::MaxMinSweep;
  } else if (kind == "minpower") {
    c.kind = ExperimentKind::PowerFeasibility;
  } else if (kind == "dof") {
    c.kind = ExperimentKind::DofSweep;
  } else {
    r.fail({"kind"}, "'kind' must be \"maxmin\", \"minpower\" or \"dof\"");
  }
  c.id = keyword(c.kind);
  if (j.contains("id")) {
    if (!j["id"].is_string() || j["id"].get<std::string>().empty() ||
        j["id"].get<std::string>().find_first_of(",\n\"") != std::string::npos) {
      r.fail({"id"}, "'id' must be a nonempty string without commas, quotes or newlines");
    }
    c.id = j["id"].get<std::string>();
  }
  if (j.contains("K")) c.users = r.integer(j["K"], {"K"});
  if (j.contains("Nt")) c.antennas = r.integer(j["Nt"], {"Nt"});
  if (j.contains("sigma2")) c.sigma2 = r.number(j["sigma2"], {"sigma2"});
  if (j.contains("snr_db")) c.snr_db = r.numbers(j["snr_db"], {"snr_db"});
  if (j.contains("delta")) {
    const auto& d = j["delta"];
    if (d.is_number()) {
      c.delta = d.get<double>();
    } else if (d.is_object()) {
      r.check_keys(d, {"delta"}, {"delta0", "alpha", "scale"});
      RadiusLaw law;
      if (!d.contains("alpha")) r.fail({"delta"}, "missing required key 'delta.alpha'");
      if (d.contains("delta0")) law.delta0 = r.number(d["delta0"], {"delta", "delta0"});
      law.alpha = r.number(d["alpha"], {"delta", "alpha"});
      if (d.contains("scale")) law.scale = r.number(d["scale"], {"delta", "scale"});
      c.delta = law;
    } else {
      r.fail({"delta"}, "'delta' must be a number or a {delta0, alpha, scale} object");
    }
  }
  if (j.contains("delta_grid")) c.delta_grid = r.numbers(j["delta_grid"], {"delta_grid"});
  if (j.contains("channels")) c.channels = r.integer(j["channels"], {"channels"});
  if (j.contains("seed")) c.seed = r.seed(j["seed"], {"seed"});
  if (j.contains("target_rate")) {
    c.target_rate = r.number(j["target_rate"], {"target_rate"});
  } else if (c.kind == ExperimentKind::PowerFeasibility) {
    r.fail({}, "missing required key 'target_rate'");
  }
  if (j.contains("oracle_samples")) {
    c.oracle_samples = r.integer(j["oracle_samples"], {"oracle_samples"});
  }
  if (j.contains("dof_fit_points")) {
    c.dof_fit_points = r.integer(j["dof_fit_points"], {"dof_fit_points"});
  } else if (c.kind == ExperimentKind::DofSweep) {
    c.dof_fit_points = std::min<int>(c.dof_fit_points, static_cast<int>(c.snr_db.size()));
  }
  if (j.contains("record_timing")) {
    if (!j["record_timing"].is_boolean()) r.fail({"record_timing"}, "'record_timing' must be a boolean");
    c.record_timing = j["record_timing"].get<bool>();
  }
  if (j.contains("ao")) c.ao = read_ao(r, j["ao"]);
  if (c.kind != ExperimentKind::PowerFeasibility && !j.contains("snr_db")) {
    r.fail({}, "missing required key 'snr_db'");
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    // Messages lead with the offending key.
    std::string key = e.what();
    key = key.substr(0, key.find_first_of(" :"));
    r.fail(j.contains(key) ? std::vector<std::string>{key} : std::vector<std::string>{},
           e.what());
  }
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["kind"] = keyword(c.kind);
  j["id"] = c.id;
  j["K"] = c.users;
  j["Nt"] = c.antennas;
  j["sigma2"] = c.sigma2;
  j["snr_db"] = c.snr_db;
  if (const auto* d = std::get_if<double>(&c.delta)) {
    j["delta"] = *d;
  } else {
    const auto& law = std::get<RadiusLaw>(c.delta);
    j["delta"] = {{"delta0", law.delta0}, {"alpha", law.alpha}, {"scale", law.scale}};
  }
  if (!c.delta_grid.empty()) j["delta_grid"] = c.delta_grid;
  j["channels"] = c.channels;
  j["seed"] = c.seed;
  if (c.kind == ExperimentKind::PowerFeasibility) j["target_rate"] = c.target_rate;
  j["oracle_samples"] = c.oracle_samples;
  j["dof_fit_points"] = c.dof_fit_points;
  j["record_timing"] = c.record_timing;
  j["ao"] = write_ao(c.ao);
  return j.dump(2) + "\n";
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  auto law_eq = [](const RadiusLaw& x, const RadiusLaw& y) {
    return x.delta0 == y.delta0 && x.alpha == y.alpha && x.scale == y.scale;
  };
  bool delta_eq = a.delta.index() == b.delta.index();
  if (delta_eq) {
    delta_eq = a.delta.index() == 0 ? std::get<double>(a.delta) == std::get<double>(b.delta)
                                    : law_eq(std::get<RadiusLaw>(a.delta),
                                             std::get<RadiusLaw>(b.delta));
  }
  const auto& x = a.ao;
  const auto& y = b.ao;
  const bool ao_eq = x.tol_rel == y.tol_rel && x.max_iter == y.max_iter &&
                     x.bootstrap_max == y.bootstrap_max &&
                     x.bootstrap_iterations == y.bootstrap_iterations &&
                     x.bootstrap_p0 == y.bootstrap_p0 && x.init.kind == y.init.kind &&
                     x.solver.tol == y.solver.tol && x.solver.feastol == y.solver.feastol &&
                     x.solver.max_iter == y.solver.max_iter;
  return a.kind == b.kind && a.id == b.id && a.users == b.users && a.antennas == b.antennas &&
         a.sigma2 == b.sigma2 && a.snr_db == b.snr_db && delta_eq &&
         a.delta_grid == b.delta_grid && a.channels == b.channels && a.seed == b.seed &&
         a.target_rate == b.target_rate && a.oracle_samples == b.oracle_samples &&
         a.dof_fit_points == b.dof_fit_points && a.record_timing == b.record_timing && ao_eq;
}

}  // namespace rsma

#include "rsma/csv.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace rsma {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_num(const std::string& s) {
  if (s == "nan") return ResultRow::kNaN;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw IoError("read_csv: bad number '" + s + "'");
  }
  if (used != s.size()) throw IoError("read_csv: bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

int user_count(const std::vector<ResultRow>& rows) {
  std::size_t k = 0;
  for (const auto& r : rows) k = std::max(k, r.rates.size());
  return static_cast<int>(k);
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  const int k_users = user_count(rows);
  out << "experiment,channel,seed,snr_db,delta,scheme,status,objective";
  for (int k = 1; k <= k_users; ++k) out << ",rate_user" << k;
  out << ",common_rate,iterations,wall_time_ms\n";
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.channel << ',' << r.seed << ',' << num(r.snr_db) << ','
        << num(r.delta) << ',' << r.scheme << ',' << r.status << ',' << num(r.objective);
    for (int k = 0; k < k_users; ++k) {
      out << ',' << (k < static_cast<int>(r.rates.size()) ? num(r.rates[k]) : "nan");
    }
    out << ',' << num(r.common_rate) << ',' << r.iterations << ',' << num(r.wall_time_ms) << '\n';
  }
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("read_csv: missing header");
  const auto header = split(line);
  const int fixed = 11;
  if (header.size() < static_cast<std::size_t>(fixed) || header[0] != "experiment") {
    throw IoError("read_csv: unexpected header");
  }
  const int k_users = static_cast<int>(header.size()) - fixed;
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != header.size()) throw IoError("read_csv: wrong number of fields");
    ResultRow r;
    r.experiment = c[0];
    r.channel = static_cast<int>(parse_num(c[1]));
    r.seed = std::stoull(c[2]);
    r.snr_db = parse_num(c[3]);
    r.delta = parse_num(c[4]);
    r.scheme = c[5];
    r.status = c[6];
    r.objective = parse_num(c[7]);
    for (int k = 0; k < k_users; ++k) r.rates.push_back(parse_num(c[8 + k]));
    r.common_rate = parse_num(c[8 + k_users]);
    r.iterations = static_cast<int>(parse_num(c[9 + k_users]));
    r.wall_time_ms = parse_num(c[10 + k_users]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  require(!rows.empty(), "emit_csv: no rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_csv(out, rows);
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

std::string summary_json(const ExperimentConfig& config, const ExperimentResult& result) {
  using nlohmann::json;
  require(!result.rows.empty(), "summary_json: no rows");
  const bool power = config.kind == ExperimentKind::PowerFeasibility;
  const char* axis = power ? "delta" : "snr_db";

  struct Agg {
    int count = 0, feasible = 0;
    double sum = 0, min = INFINITY, max = -INFINITY;
  };
  std::map<std::pair<double, std::string>, Agg> groups;
  for (const auto& r : result.rows) {
    auto& g = groups[{power ? r.delta : r.snr_db, r.scheme}];
    ++g.count;
    if (std::isfinite(r.objective)) {
      ++g.feasible;
      g.sum += r.objective;
      g.min = std::min(g.min, r.objective);
      g.max = std::max(g.max, r.objective);
    }
  }
  json points = json::array();
  for (const auto& [key, g] : groups) {
    json p;
    p[axis] = key.first;
    p["scheme"] = key.second;
    p["count"] = g.count;
    p["feasible"] = g.feasible;
    if (g.feasible > 0) {
      p["mean"] = g.sum / g.feasible;
      p["min"] = g.min;
      p["max"] = g.max;
    }
    points.push_back(p);
  }

  json out;
  out["experiment"] = config.id;
  out["kind"] = keyword(config.kind);
  out["seed"] = config.seed;
  out["channels"] = config.channels;
  out["solves"] = result.solves;
  out["failures"] = result.failures;
  out["points"] = points;

  if (power) {
    // Channels feasible for both schemes, per delta.
    std::map<std::pair<double, int>, std::map<std::string, double>> by_channel;
    for (const auto& r : result.rows) {
      if (std::isfinite(r.objective)) by_channel[{r.delta, r.channel}][r.scheme] = r.objective;
    }
    std::map<double, std::tuple<int, double, double>> both;
    for (const auto& [key, m] : by_channel) {
      if (m.count("RS") && m.count("NoRS")) {
        auto& [n, rs, nors] = both[key.first];
        ++n;
        rs += m.at("RS");
        nors += m.at("NoRS");
      }
    }
    json paired = json::array();
    for (const auto& [delta, t] : both) {
      const auto& [n, rs, nors] = t;
      paired.push_back({{"delta", delta}, {"channels", n}, {"mean_RS", rs / n},
                        {"mean_NoRS", nors / n}});
    }
    out["both_feasible"] = paired;
  }
  if (!result.fits.empty()) {
    json fits = json::array();
    for (const auto& f : result.fits) {
      fits.push_back({{"scheme", f.scheme},
                      {"slope", f.estimate.slope},
                      {"intercept", f.estimate.intercept},
                      {"r2", f.estimate.r2},
                      {"points", f.estimate.points.size()},
                      {"predicted", f.predicted}});
    }
    out["fits"] = fits;
    out["resampled"] = result.resampled;
  }
  return out.dump(2) + "\n";
}

void emit_summary(const ExperimentConfig& config, const ExperimentResult& result,
                  const std::string& path) {
  const std::string text = summary_json(config, result);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace rsma

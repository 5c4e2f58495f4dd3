#include "rsma/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

namespace rsma {

std::vector<ChannelInstance> ChannelDraw::at(double delta) const {
  std::vector<ChannelInstance> out(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    out[k].h_true = h[k];
    out[k].region.delta = delta;
    out[k].region.h_hat = h[k] - delta * direction[k];
  }
  return out;
}

ChannelDraw draw_channel(std::uint64_t seed, int channel, int users, int antennas) {
  Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(channel));
  ChannelDraw d;
  for (int k = 0; k < users; ++k) {
    d.h.push_back(sample_channel(rng, antennas));
    d.direction.push_back(sample_error(rng, 1.0, ErrorMode::Interior, antennas));
  }
  return d;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void sort_rows(std::vector<ResultRow>& rows) {
  // NaN snr (power rows) compares equal to itself here.
  auto snr_key = [](const ResultRow& r) { return std::isnan(r.snr_db) ? -1e300 : r.snr_db; };
  std::stable_sort(rows.begin(), rows.end(), [&](const ResultRow& a, const ResultRow& b) {
    return std::make_tuple(a.channel, snr_key(a), a.delta, a.scheme) <
           std::make_tuple(b.channel, snr_key(b), b.delta, b.scheme);
  });
}

namespace {

// Runs task(i) for i in [0, n) on up to `jobs` threads; the first exception
// is rethrown after all workers stop.
template <class F>
void parallel_for(int n, int jobs, F&& task) {
  jobs = std::max(1, std::min(jobs, n));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

DesignSpec make_spec(const ExperimentConfig& c, const std::vector<ChannelInstance>& inst) {
  DesignSpec spec;
  spec.strategy = c.users >= 2 ? Strategy::RS : Strategy::NoRS;
  spec.sigma2 = c.sigma2;
  for (const auto& i : inst) spec.regions.push_back(i.region);
  return spec;
}

ResultRow design_row(const ExperimentConfig& c, int channel, double snr_db, double delta,
                     const char* scheme, const DesignResult& r, double ms) {
  ResultRow row;
  row.experiment = c.id;
  row.channel = channel;
  row.seed = c.seed;
  row.snr_db = snr_db;
  row.delta = delta;
  row.scheme = scheme;
  row.status = to_string(r.status);
  row.objective = r.status == AoStatus::Infeasible ? ResultRow::kNaN : r.objective;
  row.rates = r.per_user_conservative_rates;
  row.common_rate = r.split.r_c;
  row.iterations = r.iterations;
  row.wall_time_ms = c.record_timing ? ms : 0.0;
  return row;
}

// NoRS then RS warm-started from it; with one user both rows carry the NoRS
// design because the common stream has nothing to share.
std::vector<ResultRow> paired_rows(const ExperimentConfig& c, int channel, double snr_db,
                                   double delta, const std::vector<ChannelInstance>& inst,
                                   const Objective& objective) {
  const DesignSpec spec = make_spec(c, inst);
  const auto t0 = std::chrono::steady_clock::now();
  PairedDesign pd;
  if (spec.strategy == Strategy::RS) {
    pd = design_paired(spec, objective, c.ao);
  } else {
    pd.nors = run_ao(spec, objective, c.ao);
    pd.rs = pd.nors;
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return {design_row(c, channel, snr_db, delta, "NoRS", pd.nors, ms),
          design_row(c, channel, snr_db, delta, "RS", pd.rs, ms)};
}

ExperimentResult collect(std::vector<std::vector<ResultRow>> parts, bool solves = true) {
  ExperimentResult out;
  for (auto& p : parts) {
    for (auto& r : p) out.rows.push_back(std::move(r));
  }
  sort_rows(out.rows);
  for (const auto& r : out.rows) {
    if (!solves) break;
    ++out.solves;
    if (r.status == to_string(AoStatus::SolverFailure)) ++out.failures;
  }
  return out;
}

}  // namespace

ExperimentResult run_maxmin_sweep(const ExperimentConfig& c, int jobs) {
  c.validate();
  require(c.kind == ExperimentKind::MaxMinSweep, "run_maxmin_sweep: wrong experiment kind");
  const int n_snr = static_cast<int>(c.snr_db.size());
  std::vector<std::vector<ResultRow>> parts(static_cast<std::size_t>(c.channels) * n_snr);
  parallel_for(static_cast<int>(parts.size()), jobs, [&](int task) {
    const int ch = task / n_snr;
    const double snr = c.snr_db[task % n_snr];
    const double pt = c.sigma2 * db_to_linear(snr);
    const double delta = c.radius(pt);
    const auto inst = draw_channel(c.seed, ch, c.users, c.antennas).at(delta);
    parts[task] = paired_rows(c, ch, snr, delta, inst, Objective::max_min_rate(pt));
  });
  return collect(std::move(parts));
}

ExperimentResult run_power_feasibility(const ExperimentConfig& c, int jobs) {
  c.validate();
  require(c.kind == ExperimentKind::PowerFeasibility,
          "run_power_feasibility: wrong experiment kind");
  const std::vector<double> deltas = c.power_deltas();
  const int n_delta = static_cast<int>(deltas.size());
  std::vector<std::vector<ResultRow>> parts(static_cast<std::size_t>(c.channels) * n_delta);
  parallel_for(static_cast<int>(parts.size()), jobs, [&](int task) {
    const int ch = task / n_delta;
    const double delta = deltas[task % n_delta];
    const auto inst = draw_channel(c.seed, ch, c.users, c.antennas).at(delta);
    parts[task] =
        paired_rows(c, ch, ResultRow::kNaN, delta, inst, Objective::min_power(c.target_rate));
  });
  return collect(std::move(parts));
}

ExperimentResult run_dof_sweep(const ExperimentConfig& c, int jobs) {
  c.validate();
  require(c.kind == ExperimentKind::DofSweep, "run_dof_sweep: wrong experiment kind");
  const RadiusLaw law = std::get<RadiusLaw>(c.delta);
  const int n_snr = static_cast<int>(c.snr_db.size());
  std::vector<std::vector<ResultRow>> parts(c.channels);
  std::vector<int> resampled(c.channels, 0);
  constexpr int kMaxAttempts = 100;

  parallel_for(c.channels, jobs, [&](int ch) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      // Attempt 0 is the plain channel draw; later ones are fresh streams.
      const std::uint64_t stream =
          attempt == 0 ? c.seed : hash_combine(c.seed, static_cast<std::uint64_t>(attempt));
      const ChannelDraw draw = draw_channel(stream, ch, c.users, c.antennas);
      std::vector<ResultRow> rows;
      try {
        for (int i = 0; i < n_snr; ++i) {
          const double pt = c.sigma2 * db_to_linear(c.snr_db[i]);
          const double delta = radius_at(law, pt);
          const auto inst = draw.at(delta);
          // Same common direction at every SNR point of a channel.
          Rng direction = Rng::derive(hash_combine(stream, 0xC0), static_cast<std::uint64_t>(ch));
          const Precoder rs = constructive_scheme(estimate_matrix(inst), law.alpha, pt, direction);
          Precoder nors = rs;
          nors.pc.setZero();
          Rng oracle = Rng::derive(hash_combine(stream, static_cast<std::uint64_t>(i) + 1),
                                   static_cast<std::uint64_t>(ch));
          const std::pair<const char*, const Precoder*> schemes[] = {{"ZfConstructive", &rs},
                                                                      {"NoRS", &nors}};
          for (const auto& [scheme, p] : schemes) {
            const auto t0 = std::chrono::steady_clock::now();
            const SchemeRates sr = evaluate_scheme(*p, inst, c.sigma2, c.oracle_samples, oracle);
            const double ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
            ResultRow row;
            row.experiment = c.id;
            row.channel = ch;
            row.seed = c.seed;
            row.snr_db = c.snr_db[i];
            row.delta = delta;
            row.scheme = scheme;
            row.status = to_string(AoStatus::Converged);
            row.objective = sr.min_total;
            row.rates = sr.total;
            row.common_rate = sr.r_c;
            row.wall_time_ms = c.record_timing ? ms : 0.0;
            rows.push_back(std::move(row));
          }
        }
      } catch (const DomainError&) {
        ++resampled[ch];
        continue;
      }
      parts[ch] = std::move(rows);
      return;
    }
    throw DomainError("run_dof_sweep: no full-rank channel draw found");
  });

  ExperimentResult out = collect(std::move(parts), false);
  for (int r : resampled) out.resampled += r;

  // Mean rate per SNR point and scheme, fitted over the highest points.
  const DofPrediction pred = theorem1_predictions(c.users, law.alpha);
  for (const char* scheme : {"ZfConstructive", "NoRS"}) {
    std::map<double, std::pair<double, int>> mean;
    for (const auto& row : out.rows) {
      if (row.scheme != scheme) continue;
      auto& m = mean[row.snr_db];
      m.first += row.objective;
      ++m.second;
    }
    std::vector<std::pair<double, double>> points;
    for (const auto& [snr, m] : mean) {
      points.emplace_back(c.sigma2 * db_to_linear(snr), m.first / m.second);
    }
    points.erase(points.begin(), points.end() - c.dof_fit_points);
    SchemeFit fit;
    fit.scheme = scheme;
    fit.estimate = dof_estimate(points);
    fit.predicted = std::string(scheme) == "NoRS" ? pred.d_nors : pred.d_rs;
    out.fits.push_back(std::move(fit));
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& c, int jobs) {
  switch (c.kind) {
    case ExperimentKind::MaxMinSweep: return run_maxmin_sweep(c, jobs);
    case ExperimentKind::PowerFeasibility: return run_power_feasibility(c, jobs);
    case ExperimentKind::DofSweep: return run_dof_sweep(c, jobs);
  }
  throw ContractError("run_experiment: unknown kind");
}

}  // namespace rsma

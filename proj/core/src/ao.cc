#include "rsma/ao.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "rsma/lmi.h"

namespace rsma {

const char* to_string(Strategy s) { return s == Strategy::RS ? "RS" : "NoRS"; }

const char* to_string(AoStatus s) {
  switch (s) {
    case AoStatus::Converged: return "Converged";
    case AoStatus::IterationCap: return "IterationCap";
    case AoStatus::Infeasible: return "Infeasible";
    case AoStatus::SolverFailure: return "SolverFailure";
  }
  return "Unknown";
}

InitStrategy InitStrategy::warm_start(Precoder p, std::optional<WmseState> eq) {
  InitStrategy s;
  s.kind = Kind::WarmStart;
  s.warm = std::move(p);
  s.equalizers = std::move(eq);
  return s;
}

void AoConfig::validate() const {
  require(tol_rel > 0, "AoConfig: tol_rel must be positive");
  require(max_iter >= 1, "AoConfig: max_iter must be >= 1");
  require(bootstrap_max >= 0, "AoConfig: bootstrap_max must be >= 0");
  require(bootstrap_iterations >= 1, "AoConfig: bootstrap_iterations must be >= 1");
  require(!bootstrap_p0 || *bootstrap_p0 > 0, "AoConfig: bootstrap_p0 must be positive");
}

int DesignSpec::antennas() const {
  return regions.empty() ? 0 : static_cast<int>(regions.front().h_hat.size());
}

void DesignSpec::validate() const {
  require(!regions.empty(), "DesignSpec: no users");
  const auto nt = regions.front().h_hat.size();
  require(nt >= 1, "DesignSpec: empty channel estimate");
  for (const auto& r : regions) {
    require(r.h_hat.size() == nt, "DesignSpec: estimates differ in length");
    require(r.delta >= 0, "DesignSpec: negative radius");
    require(r.h_hat.allFinite(), "DesignSpec: non-finite channel estimate");
  }
  require(users() <= nt, "DesignSpec: more users than antennas");
  require(sigma2 > 0, "DesignSpec: sigma2 must be positive");
  require(strategy == Strategy::NoRS || users() >= 2, "DesignSpec: RS needs at least two users");
  require(!zero_common || strategy == Strategy::RS, "DesignSpec: zero_common applies to RS only");
}

DesignSpec restrict_nors(DesignSpec spec) {
  spec.strategy = Strategy::NoRS;
  spec.zero_common = false;
  return spec;
}

// ---------------------------------------------------------------------------
// Evaluation

RateSplit max_min_split(std::span<const double> private_rates, double r_c) {
  require(!private_rates.empty(), "max_min_split: no users");
  require(r_c >= 0, "max_min_split: negative common rate");
  const std::size_t k = private_rates.size();
  RateSplit out;
  out.c.assign(k, 0.0);
  out.r_c = r_c;
  if (r_c == 0.0) return out;
  // Raise the lowest rates to a common level L with sum max(0, L - r_k) = r_c.
  std::vector<double> sorted(private_rates.begin(), private_rates.end());
  std::sort(sorted.begin(), sorted.end());
  double level = 0.0;
  double prefix = 0.0;
  for (std::size_t m = 1; m <= k; ++m) {
    prefix += sorted[m - 1];
    level = (r_c + prefix) / static_cast<double>(m);
    if (m == k || level <= sorted[m]) break;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    out.c[i] = std::max(0.0, level - private_rates[i]);
    sum += out.c[i];
  }
  // Remove rounding so the split sums to r_c exactly up to one ulp.
  if (sum > 0.0) {
    for (double& c : out.c) c *= r_c / sum;
  }
  out.r_c = std::accumulate(out.c.begin(), out.c.end(), 0.0);
  return out;
}

Evaluation evaluate_design(const DesignSpec& spec, const Precoder& p, const WmseState& eq) {
  const int k_users = spec.users();
  Evaluation ev;
  ev.mse_c.assign(k_users, 1.0);
  ev.mse.assign(k_users, 1.0);
  ev.rate_c.assign(k_users, 0.0);
  ev.rate.assign(k_users, 0.0);
  for (int k = 0; k < k_users; ++k) {
    const auto& region = spec.regions[k];
    ev.mse[k] = worst_case_mse(region, p, spec.sigma2, k, Stream::Private, eq.g(k));
    ev.rate[k] = -std::log2(ev.mse[k]);
    if (spec.has_common()) {
      ev.mse_c[k] = worst_case_mse(region, p, spec.sigma2, k, Stream::Common, eq.g_c(k));
      ev.rate_c[k] = -std::log2(ev.mse_c[k]);
    }
  }
  const double r_c =
      spec.has_common() ? std::max(0.0, *std::min_element(ev.rate_c.begin(), ev.rate_c.end()))
                        : 0.0;
  ev.split = max_min_split(ev.rate, r_c);
  ev.total.resize(k_users);
  for (int k = 0; k < k_users; ++k) ev.total[k] = ev.rate[k] + ev.split.c[k];
  ev.min_total = *std::min_element(ev.total.begin(), ev.total.end());
  return ev;
}

// ---------------------------------------------------------------------------
// Equalizer and weight steps

EqualizerStepResult equalizer_step(const UncertaintyRegion& region, const Precoder& p,
                                   double sigma2, int k, Stream stream,
                                   const SolverOptions& options) {
  require(k >= 0 && k < p.users(), "equalizer_step: user index out of range");
  require(region.h_hat.size() == p.antennas(), "equalizer_step: dimension mismatch");
  ConicProblem prob;
  const ComplexAffine g = prob.add_complex_variable("g");
  const auto tau = AffineExpr::variable(prob.add_variable("tau"));
  const auto lambda = AffineExpr::variable(prob.add_variable("lambda"));
  const auto s = AffineExpr::variable(prob.add_variable("s"));
  if (stream == Stream::Private) {
    prob.add(build_private_lmi(region.h_hat, region.delta, AffineMatrix::constant(p.pp), g, k,
                               tau, lambda));
  } else {
    prob.add(build_common_lmi(region.h_hat, region.delta, AffineMatrix::constant(p.full()), g,
                              tau, lambda));
  }
  prob.add_lmi(build_scalar_square_epigraph(g, s));
  prob.objective = tau + sigma2 * s;

  const Solution sol = solve(prob, options);
  EqualizerStepResult out;
  out.status = sol.status;
  if (sol.x.size() == prob.n_vars() && sol.x.allFinite()) {
    out.g = Complex(sol.x(0), sol.x(1));
    out.eps_cons = sol.x(2) + std::norm(out.g) * sigma2;
  }
  if (!(out.eps_cons > 0) || out.eps_cons >= 1.0) {
    // The zero equalizer always attains MSE 1.
    out.g = 0.0;
    out.eps_cons = 1.0;
  }
  return out;
}

double weight_step(double eps_cons) {
  if (!(eps_cons > 0)) throw DomainError("weight_step: MSE must be positive");
  return 1.0 / eps_cons;
}

// ---------------------------------------------------------------------------
// Precoder steps

namespace {

struct PrecoderVars {
  AffineMatrix full;   // Nt x (K+1) for RS, Nt x K for NoRS
  AffineMatrix priv;   // Nt x K
  std::vector<int> tau, lambda, tau_c, lambda_c, c;
  int r_c = -1;
  int r_t = -1;
  int t = -1;
};

PrecoderVars add_precoder_variables(ConicProblem& prob, const DesignSpec& spec) {
  const int nt = spec.antennas();
  const int k_users = spec.users();
  const int off = spec.has_common() ? 1 : 0;
  PrecoderVars v;
  v.full = AffineMatrix(nt, k_users + off);
  v.priv = AffineMatrix(nt, k_users);
  if (spec.has_common()) {
    for (int i = 0; i < nt; ++i) {
      if (!spec.zero_common) {
        v.full(i, 0) = prob.add_complex_variable("pc[" + std::to_string(i) + "]");
      }
    }
  }
  for (int k = 0; k < k_users; ++k) {
    for (int i = 0; i < nt; ++i) {
      const auto e =
          prob.add_complex_variable("p" + std::to_string(k + 1) + "[" + std::to_string(i) + "]");
      v.full(i, k + off) = e;
      v.priv(i, k) = e;
    }
  }
  for (int k = 0; k < k_users; ++k) {
    const std::string id = std::to_string(k + 1);
    v.tau.push_back(prob.add_variable("tau" + id));
    v.lambda.push_back(prob.add_variable("lambda" + id));
    if (spec.has_common()) {
      v.tau_c.push_back(prob.add_variable("tau_c" + id));
      v.lambda_c.push_back(prob.add_variable("lambda_c" + id));
      v.c.push_back(prob.add_variable("c" + id));
    }
  }
  if (spec.has_common()) v.r_c = prob.add_variable("r_c");
  return v;
}

// Conservative rate  (1 + ln u - u (tau + |g|^2 sigma2)) / ln 2  as an affine
// function of tau.
AffineExpr conservative_rate_expr(int tau, Complex g, double u, double sigma2) {
  const double ln2 = std::numbers::ln2;
  AffineExpr e((1.0 + std::log(u) - u * std::norm(g) * sigma2) / ln2);
  e.terms.push_back({tau, -u / ln2});
  return e;
}

// Constraints shared by the rate and power problems; `rate_floor` is the
// total-rate lower bound (variable R_t or a fixed target).
void add_rate_constraints(ConicProblem& prob, const DesignSpec& spec, const WmseState& st,
                          const PrecoderVars& v, const AffineExpr& rate_floor) {
  const int k_users = spec.users();
  for (int k = 0; k < k_users; ++k) {
    const auto& region = spec.regions[k];
    const std::string id = std::to_string(k + 1);
    prob.add(build_private_lmi(region.h_hat, region.delta, v.priv, st.g(k), k,
                               AffineExpr::variable(v.tau[k]),
                               AffineExpr::variable(v.lambda[k])));
    AffineExpr total = conservative_rate_expr(v.tau[k], st.g(k), st.u(k), spec.sigma2);
    if (spec.has_common()) total += AffineExpr::variable(v.c[k]);
    prob.add_nonneg(total - rate_floor, "total_rate_" + id);
    if (spec.has_common()) {
      prob.add(build_common_lmi(region.h_hat, region.delta, v.full, st.g_c(k),
                                AffineExpr::variable(v.tau_c[k]),
                                AffineExpr::variable(v.lambda_c[k])));
      prob.add_nonneg(conservative_rate_expr(v.tau_c[k], st.g_c(k), st.u_c(k), spec.sigma2) -
                          AffineExpr::variable(v.r_c),
                      "common_rate_" + id);
      prob.add_nonneg(AffineExpr::variable(v.c[k]), "split_" + id);
    }
  }
  if (spec.has_common()) {
    AffineExpr sum = -AffineExpr::variable(v.r_c);
    for (int c : v.c) sum += AffineExpr::variable(c);
    prob.add_equality(sum, "split_sum");
  }
}

void check_state(const DesignSpec& spec, const WmseState& st) {
  spec.validate();
  st.validate();
  require(st.users() == spec.users(), "precoder step: WmseState size mismatch");
}

PrecoderStepResult extract(const DesignSpec& spec, const PrecoderVars& v, const Solution& sol) {
  PrecoderStepResult out;
  out.status = sol.status;
  const int nt = spec.antennas();
  const int k_users = spec.users();
  if (sol.x.size() == 0 || !sol.x.allFinite()) {
    out.precoder = Precoder::zeros(nt, k_users);
    return out;
  }
  const std::span<const double> x(sol.x.data(), static_cast<std::size_t>(sol.x.size()));
  const CMatrix full = v.full.evaluate(x);
  if (spec.has_common()) {
    out.precoder = Precoder(full.col(0), full.rightCols(k_users));
  } else {
    out.precoder = Precoder(CVector::Zero(nt), full);
  }
  out.split.c.assign(k_users, 0.0);
  for (int k = 0; k < k_users; ++k) {
    out.tau.push_back(sol.x(v.tau[k]));
    if (spec.has_common()) {
      out.tau_c.push_back(sol.x(v.tau_c[k]));
      out.split.c[k] = std::max(0.0, sol.x(v.c[k]));
    }
  }
  out.split.r_c = std::accumulate(out.split.c.begin(), out.split.c.end(), 0.0);
  return out;
}

}  // namespace

ConicProblem build_rate_problem(const DesignSpec& spec, const WmseState& state, double pt) {
  check_state(spec, state);
  require(pt >= 0, "rate problem: negative power budget");
  ConicProblem prob;
  PrecoderVars v = add_precoder_variables(prob, spec);
  v.r_t = prob.add_variable("r_t");
  add_rate_constraints(prob, spec, state, v, AffineExpr::variable(v.r_t));
  auto soc = build_power_constraint(v.full, pt);
  soc.label = "power";
  prob.add_soc(std::move(soc));
  prob.objective = -AffineExpr::variable(v.r_t);
  return prob;
}

ConicProblem build_power_problem(const DesignSpec& spec, const WmseState& state, double target) {
  check_state(spec, state);
  ConicProblem prob;
  PrecoderVars v = add_precoder_variables(prob, spec);
  v.t = prob.add_variable("t");
  add_rate_constraints(prob, spec, state, v, AffineExpr(target));
  auto soc = build_power_constraint(v.full, AffineExpr::variable(v.t));
  soc.label = "power";
  prob.add_soc(std::move(soc));
  prob.objective = AffineExpr::variable(v.t);
  return prob;
}

PrecoderStepResult precoder_step_rate(const DesignSpec& spec, const WmseState& state, double pt,
                                      const SolverOptions& options) {
  const ConicProblem prob = build_rate_problem(spec, state, pt);
  // Variable layout is deterministic, so rebuild the index map on a scratch
  // problem instead of threading it through build_rate_problem.
  ConicProblem scratch;
  PrecoderVars v = add_precoder_variables(scratch, spec);
  v.r_t = scratch.add_variable("r_t");
  const Solution sol = solve(prob, options);
  PrecoderStepResult out = extract(spec, v, sol);
  if (sol.x.size() > 0) out.value = sol.x(v.r_t);
  return out;
}

PrecoderStepResult precoder_step_power(const DesignSpec& spec, const WmseState& state,
                                       double target, const SolverOptions& options) {
  const ConicProblem prob = build_power_problem(spec, state, target);
  ConicProblem scratch;
  PrecoderVars v = add_precoder_variables(scratch, spec);
  const Solution sol = solve(prob, options);
  PrecoderStepResult out = extract(spec, v, sol);
  out.value = precoder_power(out.precoder);
  return out;
}

// ---------------------------------------------------------------------------
// Initialization

namespace {

CMatrix estimates(const DesignSpec& spec) {
  CMatrix h(spec.antennas(), spec.users());
  for (int k = 0; k < spec.users(); ++k) h.col(k) = spec.regions[k].h_hat;
  return h;
}

CVector dominant_direction(const DesignSpec& spec) {
  const CMatrix h = estimates(spec);
  Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeThinU);
  CVector u = svd.matrixU().col(0);
  if (u.norm() == 0.0 || !u.allFinite()) {
    u = CVector::Zero(spec.antennas());
    u(0) = 1.0;
  }
  return u / u.norm();
}

double private_share(const DesignSpec& spec) {
  return spec.has_common() && !spec.zero_common ? 0.5 : 1.0;
}

Precoder with_columns(const DesignSpec& spec, const CMatrix& dirs, double pt) {
  const int k_users = spec.users();
  const double share = private_share(spec);
  CMatrix pp = dirs * std::sqrt(share * pt / k_users);
  CVector pc = CVector::Zero(spec.antennas());
  if (share < 1.0) pc = dominant_direction(spec) * std::sqrt((1.0 - share) * pt);
  return Precoder(pc, pp);
}

}  // namespace

Precoder mrt_init(const DesignSpec& spec, double pt) {
  spec.validate();
  CMatrix dirs = estimates(spec);
  for (int k = 0; k < spec.users(); ++k) {
    const double n = dirs.col(k).norm();
    if (n > 0) {
      dirs.col(k) /= n;
    } else {
      dirs.col(k).setZero();
      dirs(0, k) = 1.0;
    }
  }
  return with_columns(spec, dirs, pt);
}

Precoder zf_init(const DesignSpec& spec, double pt) {
  spec.validate();
  const CMatrix h = estimates(spec);
  // Columns of the pseudo-inverse of H^H: h_j^H p_k = 0 for j != k.
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(h.adjoint());
  if (cod.rank() < spec.users()) return mrt_init(spec, pt);
  CMatrix dirs = cod.pseudoInverse();
  for (int k = 0; k < spec.users(); ++k) dirs.col(k) /= dirs.col(k).norm();
  return with_columns(spec, dirs, pt);
}

Precoder embed_nors(const DesignSpec& spec, const Precoder& nors, double budget,
                    double common_fraction) {
  spec.validate();
  require(common_fraction >= 0 && common_fraction <= 1, "embed_nors: fraction outside [0, 1]");
  require(nors.users() == spec.users() && nors.antennas() == spec.antennas(),
          "embed_nors: precoder shape mismatch");
  const double common = common_fraction * budget;
  const double priv = precoder_power(Precoder(CVector::Zero(spec.antennas()), nors.pp));
  const double room = std::max(0.0, budget - common);
  const double scale = priv > room && priv > 0 ? std::sqrt(room / priv) : 1.0;
  return Precoder(dominant_direction(spec) * std::sqrt(common), nors.pp * scale);
}

// ---------------------------------------------------------------------------
// AO loop

namespace {

struct EqualizerUpdate {
  WmseState state;
  bool solver_ok = true;
};

// Equalizer SDPs for every stream, keeping the previous equalizer when its
// exact worst-case MSE is lower; weights are the reciprocal MSEs.
EqualizerUpdate update_equalizers(const DesignSpec& spec, const Precoder& p,
                                  const std::optional<WmseState>& previous,
                                  const SolverOptions& options) {
  const int k_users = spec.users();
  EqualizerUpdate out;
  out.state = WmseState::unit(k_users);
  auto pick = [&](int k, Stream stream, std::optional<Complex> old) {
    const auto& region = spec.regions[k];
    const EqualizerStepResult step = equalizer_step(region, p, spec.sigma2, k, stream, options);
    if (step.status != SolveStatus::Optimal) out.solver_ok = false;
    Complex best = 0.0;
    double best_mse = 1.0;
    auto consider = [&](Complex g) {
      const double m = worst_case_mse(region, p, spec.sigma2, k, stream, g);
      if (std::isfinite(m) && m < best_mse) {
        best_mse = m;
        best = g;
      }
    };
    consider(step.g);
    if (old) consider(*old);
    return std::pair{best, best_mse};
  };
  for (int k = 0; k < k_users; ++k) {
    std::optional<Complex> old;
    if (previous) old = previous->g(k);
    const auto [g, m] = pick(k, Stream::Private, old);
    out.state.g(k) = g;
    out.state.u(k) = weight_step(m);
    if (spec.has_common()) {
      std::optional<Complex> old_c;
      if (previous) old_c = previous->g_c(k);
      const auto [gc, mc] = pick(k, Stream::Common, old_c);
      out.state.g_c(k) = gc;
      out.state.u_c(k) = weight_step(mc);
    }
  }
  return out;
}

// A stalled solve still carries its best iterate; the certified evaluation
// that follows decides whether it is kept.
bool usable(const PrecoderStepResult& step) {
  if (step.status == SolveStatus::Infeasible || step.status == SolveStatus::Unbounded) {
    return false;
  }
  const double power = precoder_power(step.precoder);
  return std::isfinite(power) && power > 0.0;
}

bool relative_change_below(double prev, double cur, double tol) {
  return std::abs(cur - prev) / std::max(1.0, std::abs(cur)) < tol;
}

DesignResult finish(const DesignSpec& spec, const Precoder& p, const WmseState& st,
                    double objective, std::vector<double> trace, AoStatus status,
                    int iterations) {
  const Evaluation ev = evaluate_design(spec, p, st);
  DesignResult r;
  r.precoder = p;
  r.split = ev.split;
  r.wmse_state = st;
  r.objective = objective;
  r.per_user_conservative_rates = ev.total;
  r.common_rates = ev.rate_c;
  r.trace = std::move(trace);
  r.status = status;
  r.iterations = iterations;
  return r;
}

std::optional<WmseState> usable_equalizers(const DesignSpec& spec,
                                           const std::optional<WmseState>& eq) {
  if (!eq || eq->users() != spec.users()) return std::nullopt;
  return eq;
}

// Margin added to the rate target inside the power SDP so the certified
// rates of its solution clear the target despite solver tolerances.
double target_margin(double target) { return 1e-7 * std::max(1.0, std::abs(target)); }

DesignResult run_rate(const DesignSpec& spec, double pt, const AoConfig& config,
                      int max_iter) {
  Precoder p;
  switch (config.init.kind) {
    case InitStrategy::Kind::MrtEqualSplit: p = mrt_init(spec, pt); break;
    case InitStrategy::Kind::ZfEqualSplit: p = zf_init(spec, pt); break;
    case InitStrategy::Kind::WarmStart:
      require(config.init.warm.users() == spec.users() &&
                  config.init.warm.antennas() == spec.antennas(),
              "run_ao: warm-start precoder shape mismatch");
      p = config.init.warm;
      break;
  }
  if (!spec.has_common() || spec.zero_common) p.pc.setZero();

  WmseState st =
      update_equalizers(spec, p, usable_equalizers(spec, config.init.equalizers), config.solver)
          .state;
  Evaluation ev = evaluate_design(spec, p, st);
  std::vector<double> trace{ev.min_total};
  AoStatus status = AoStatus::IterationCap;
  int iterations = 0;
  for (int it = 0; it < max_iter; ++it) {
    PrecoderStepResult step = precoder_step_rate(spec, st, pt, config.solver);
    if (!usable(step)) {
      status = iterations == 0 ? AoStatus::SolverFailure : AoStatus::Converged;
      break;
    }
    const double used = precoder_power(step.precoder);
    if (used > pt) {
      const double shrink = std::sqrt(pt / used);
      step.precoder.pc *= shrink;
      step.precoder.pp *= shrink;
    }
    const WmseState st_new = update_equalizers(spec, step.precoder, st, config.solver).state;
    const Evaluation ev_new = evaluate_design(spec, step.precoder, st_new);
    if (!(ev_new.min_total >= ev.min_total)) {
      // Only solver inaccuracy near a fixed point gets here.
      status = AoStatus::Converged;
      break;
    }
    const double prev = ev.min_total;
    p = step.precoder;
    st = st_new;
    ev = ev_new;
    trace.push_back(ev.min_total);
    ++iterations;
    if (relative_change_below(prev, ev.min_total, config.tol_rel)) {
      status = AoStatus::Converged;
      break;
    }
  }
  return finish(spec, p, st, ev.min_total, std::move(trace), status, iterations);
}

DesignResult run_power(const DesignSpec& spec, double target, const AoConfig& config) {
  const int nt = spec.antennas();
  const int k_users = spec.users();
  if (target <= 0.0) {
    const Precoder zero = Precoder::zeros(nt, k_users);
    return finish(spec, zero, WmseState::unit(k_users), 0.0, {0.0}, AoStatus::Converged, 0);
  }

  Precoder p;
  WmseState st;
  bool have_start = false;
  if (config.init.kind == InitStrategy::Kind::WarmStart) {
    require(config.init.warm.users() == k_users && config.init.warm.antennas() == nt,
            "run_ao: warm-start precoder shape mismatch");
    p = config.init.warm;
    if (!spec.has_common() || spec.zero_common) p.pc.setZero();
    st = update_equalizers(spec, p, usable_equalizers(spec, config.init.equalizers),
                           config.solver)
             .state;
    have_start = evaluate_design(spec, p, st).min_total >= target;
  }
  if (!have_start) {
    const BootstrapResult boot = bootstrap_power_problem(target, spec, config);
    if (!boot.feasible) {
      DesignResult r = finish(spec, boot.precoder, boot.wmse_state,
                              std::numeric_limits<double>::quiet_NaN(), {},
                              AoStatus::Infeasible, 0);
      return r;
    }
    p = boot.precoder;
    st = boot.wmse_state;
  }

  double power = precoder_power(p);
  std::vector<double> trace{power};
  AoStatus status = AoStatus::IterationCap;
  int iterations = 0;
  for (int it = 0; it < config.max_iter; ++it) {
    const PrecoderStepResult step =
        precoder_step_power(spec, st, target + target_margin(target), config.solver);
    if (!usable(step)) {
      status = AoStatus::Converged;
      break;
    }
    const WmseState st_new = update_equalizers(spec, step.precoder, st, config.solver).state;
    const Evaluation ev_new = evaluate_design(spec, step.precoder, st_new);
    if (!(ev_new.min_total >= target) || !(step.value <= power)) {
      status = AoStatus::Converged;
      break;
    }
    const double prev = power;
    p = step.precoder;
    st = st_new;
    power = step.value;
    trace.push_back(power);
    ++iterations;
    if (relative_change_below(prev, power, config.tol_rel)) {
      status = AoStatus::Converged;
      break;
    }
  }
  return finish(spec, p, st, power, std::move(trace), status, iterations);
}

}  // namespace

BootstrapResult bootstrap_power_problem(double target, const DesignSpec& spec,
                                        const AoConfig& config) {
  spec.validate();
  config.validate();
  require(target >= 0, "bootstrap: negative target");
  BootstrapResult out;
  if (target == 0.0) {
    out.feasible = true;
    out.precoder = Precoder::zeros(spec.antennas(), spec.users());
    out.wmse_state = WmseState::unit(spec.users());
    return out;
  }
  const double p0 = config.bootstrap_p0.value_or(spec.sigma2 * (std::exp2(target) - 1.0));
  AoConfig round = config;
  for (int j = 0; j <= config.bootstrap_max; ++j) {
    const double budget = p0 * std::exp2(j);
    const DesignResult r = run_rate(spec, budget, round, config.bootstrap_iterations);
    out.rounds = j + 1;
    out.budget = budget;
    out.precoder = r.precoder;
    out.wmse_state = r.wmse_state;
    out.achieved = r.objective;
    if (r.objective >= target) {
      out.feasible = true;
      return out;
    }
    Precoder next = r.precoder;
    next.pc *= std::sqrt(2.0);
    next.pp *= std::sqrt(2.0);
    round.init = InitStrategy::warm_start(next, r.wmse_state);
  }
  return out;
}

DesignResult run_ao(const DesignSpec& spec, const Objective& objective, const AoConfig& config) {
  spec.validate();
  config.validate();
  if (objective.kind == Objective::Kind::MaxMinRate) {
    require(objective.value > 0, "run_ao: power budget must be positive");
    return run_rate(spec, objective.value, config, config.max_iter);
  }
  require(objective.value >= 0, "run_ao: rate target must be nonnegative");
  return run_power(spec, objective.value, config);
}

PairedDesign design_paired(const DesignSpec& spec, const Objective& objective,
                           const AoConfig& config) {
  spec.validate();
  require(spec.strategy == Strategy::RS, "design_paired: spec must use RS");
  PairedDesign out;
  const DesignSpec nors_spec = restrict_nors(spec);
  out.nors = run_ao(nors_spec, objective, config);
  const bool rate = objective.kind == Objective::Kind::MaxMinRate;
  const bool nors_ok = out.nors.status != AoStatus::Infeasible &&
                       out.nors.status != AoStatus::SolverFailure;

  AoConfig rs_config = config;
  if (nors_ok) {
    Precoder warm;
    if (rate) {
      warm = embed_nors(spec, out.nors.precoder, objective.value, 0.01);
    } else {
      const double extra = 0.01 * std::max(precoder_power(out.nors.precoder), 1e-12);
      warm = embed_nors(spec, out.nors.precoder, precoder_power(out.nors.precoder) + extra,
                        extra / (precoder_power(out.nors.precoder) + extra));
    }
    WmseState eq = out.nors.wmse_state;
    rs_config.init = InitStrategy::warm_start(warm, eq);
  }
  out.rs = run_ao(spec, objective, rs_config);

  if (nors_ok) {
    const bool worse = out.rs.status == AoStatus::Infeasible ||
                       !std::isfinite(out.rs.objective) ||
                       (rate ? out.rs.objective < out.nors.objective
                             : out.rs.objective > out.nors.objective);
    if (worse) {
      WmseState st = out.nors.wmse_state;
      st.g_c.setZero();
      st.u_c.setOnes();
      Precoder p = out.nors.precoder;
      p.pc.setZero();
      std::vector<double> trace;
      if (out.rs.status != AoStatus::Infeasible) trace = out.rs.trace;
      trace.push_back(out.nors.objective);
      const int iterations = out.rs.iterations;
      out.rs = finish(spec, p, st, out.nors.objective, std::move(trace), out.nors.status,
                      iterations);
    }
  }
  return out;
}

}  // namespace rsma

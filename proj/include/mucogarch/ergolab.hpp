#pragma once

// Empirical ergodicity diagnostics: synchronous coupling, stationary moment
// estimates, multi-start distribution comparison (Kolmogorov-Smirnov proxy
// for total variation), the irreducibility rank probe and the no-jump
// return-time check used for aperiodicity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mucogarch/errors.hpp"
#include "mucogarch/levy.hpp"
#include "mucogarch/matcore.hpp"
#include "mucogarch/parallel.hpp"
#include "mucogarch/process.hpp"
#include "mucogarch/rng.hpp"

namespace mucogarch {

struct ExperimentConfig {
  ModelParams params;
  CompoundPoissonSpec spec;
  double p = 1.0;
  std::vector<PsdMatrix> initial_states;
  double horizon = 10.0;
  std::optional<double> burn_in;  // default 10 / |m_B|
  std::vector<double> grid;       // default: 201 equally spaced points on [0, horizon]
  std::size_t n_paths = 1000;
  std::size_t n_batches = 20;
  std::uint64_t seed = 0;
  ExecPolicy policy;
};

/// Relaxation-scale burn-in 10 / |m_B| (0 when m_B = 0).
inline double default_burn_in(const ModelParams& params) {
  const double m = std::abs(numerical_range_max(params.B()));
  return m > 0.0 ? 10.0 / m : 0.0;
}

inline std::vector<double> uniform_grid(double t0, double t1, std::size_t points) {
  if (points < 2 || !(t1 >= t0)) throw InvalidArgument("uniform_grid: need t1 >= t0 and >= 2 points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(points - 1);
  g.back() = t1;
  return g;
}

namespace detail {

struct Resolved {
  double burn_in = 0.0;
  std::vector<double> grid;
};

inline Resolved resolve(const ExperimentConfig& cfg, std::size_t min_states) {
  if (cfg.initial_states.size() < min_states)
    throw InvalidArgument("experiment needs at least " + std::to_string(min_states) +
                          " initial states");
  if (cfg.spec.dim() != cfg.params.dim())
    throw InvalidArgument("experiment: noise dimension differs from model dimension");
  for (const auto& s : cfg.initial_states)
    if (s.dim() != cfg.params.dim()) throw InvalidArgument("experiment: initial state dimension");
  if (!(cfg.horizon >= 0.0) || !std::isfinite(cfg.horizon))
    throw InvalidArgument("experiment: horizon must be finite and >= 0");
  Resolved r;
  r.burn_in = cfg.burn_in ? *cfg.burn_in : default_burn_in(cfg.params);
  if (!(r.burn_in >= 0.0)) throw InvalidArgument("experiment: burn-in must be >= 0");
  if (cfg.horizon > 0.0 && !(r.burn_in < cfg.horizon))
    throw InvalidArgument("experiment: burn-in must be smaller than the horizon");
  r.grid = cfg.grid.empty() && cfg.horizon > 0.0 ? uniform_grid(0.0, cfg.horizon, 201) : cfg.grid;
  std::sort(r.grid.begin(), r.grid.end());
  for (double t : r.grid)
    if (t < 0.0 || t > cfg.horizon) throw InvalidArgument("experiment: grid outside [0, horizon]");
  return r;
}

inline JumpTrain train_or_empty(const CompoundPoissonSpec& spec, double horizon,
                                std::uint64_t seed) {
  if (horizon > 0.0) return sample_jump_train(spec, horizon, seed);
  return JumpTrain{};
}

inline Estimate mean_and_stderr(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Synchronous coupling

struct CouplingRow {
  double t = 0.0;
  double mean_distance = 0.0;  // mean over paths and start pairs of ||Y^x_t - Y^y_t||_F
};

struct CouplingResult {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double slope_stderr = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  double burn_in = 0.0;
  std::size_t fit_points = 0;
  std::vector<CouplingRow> rows;
};

/// Runs every initial state on the same jump trains and fits
/// log E||Y^x_t - Y^y_t||_F = intercept + slope t over grid times >= burn-in.
/// A diagnostic only: the slope is not an estimate of the ergodic rate.
inline CouplingResult coupling_experiment(const ExperimentConfig& cfg) {
  const detail::Resolved r = detail::resolve(cfg, 2);
  const std::size_t m = r.grid.size();
  const std::size_t s = cfg.initial_states.size();
  const std::size_t pairs = s * (s - 1) / 2;
  if (cfg.n_paths == 0) throw InvalidArgument("coupling_experiment: n_paths must be positive");
  std::vector<double> per_path(cfg.n_paths * m, 0.0);
  parallel_for(cfg.n_paths, cfg.policy, [&](std::size_t i) {
    const JumpTrain train =
        detail::train_or_empty(cfg.spec, cfg.horizon, derive_seed(cfg.seed, "coupling", i));
    std::vector<std::vector<Matrix>> ys;
    for (const auto& y0 : cfg.initial_states) ys.push_back(states_at(cfg.params, y0, train, r.grid));
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = a + 1; b < s; ++b) acc += (ys[a][j] - ys[b][j]).norm();
      per_path[i * m + j] = acc / static_cast<double>(pairs);
    }
  });

  CouplingResult res;
  res.burn_in = r.burn_in;
  std::vector<double> ts, ls;
  for (std::size_t j = 0; j < m; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < cfg.n_paths; ++i) acc += per_path[i * m + j];
    const double mean = acc / static_cast<double>(cfg.n_paths);
    res.rows.push_back({r.grid[j], mean});
    if (r.grid[j] >= r.burn_in && mean > 0.0 && std::isfinite(std::log(mean))) {
      ts.push_back(r.grid[j]);
      ls.push_back(std::log(mean));
    }
  }
  res.fit_points = ts.size();
  if (ts.size() < 3) return res;

  const double n = static_cast<double>(ts.size());
  double tm = 0.0, lm = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tm += ts[i];
    lm += ls[i];
  }
  tm /= n;
  lm /= n;
  double stt = 0.0, stl = 0.0, sll = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - tm) * (ts[i] - tm);
    stl += (ts[i] - tm) * (ls[i] - lm);
    sll += (ls[i] - lm) * (ls[i] - lm);
  }
  if (stt == 0.0) return res;
  res.slope = stl / stt;
  res.intercept = lm - res.slope * tm;
  const double sse = std::max(sll - res.slope * stl, 0.0);
  res.r_squared = sll > 0.0 ? 1.0 - sse / sll : 1.0;
  res.slope_stderr = std::sqrt(sse / (n - 2.0) / stt);
  return res;
}

// ---------------------------------------------------------------------------
// Stationary moments

struct MomentTraceRow {
  double t = 0.0;
  double value = 0.0;         // ||Y_t||_2^p
  double running_mean = 0.0;  // average over post-burn-in grid times up to t
};

struct MomentResult {
  double p = 0.0;
  Estimate time_average;  // batch means
  std::size_t n_samples = 0;
  std::size_t n_batches = 0;
  double burn_in = 0.0;
  std::vector<MomentTraceRow> trace;
};

/// Time average of ||Y_t||_2^p over grid times after burn-in along one long
/// path from the first initial state; the error bar comes from batch means.
inline MomentResult stationary_moment_estimate(const ExperimentConfig& cfg) {
  const detail::Resolved r = detail::resolve(cfg, 1);
  if (cfg.n_batches < 2) throw InvalidArgument("stationary_moment_estimate: need >= 2 batches");
  const JumpTrain train =
      detail::train_or_empty(cfg.spec, cfg.horizon, derive_seed(cfg.seed, "moments"));
  const std::vector<Matrix> ys = states_at(cfg.params, cfg.initial_states.front(), train, r.grid);

  MomentResult res;
  res.p = cfg.p;
  res.burn_in = r.burn_in;
  std::vector<double> vals;
  double acc = 0.0;
  for (std::size_t j = 0; j < r.grid.size(); ++j) {
    if (r.grid[j] < r.burn_in) continue;
    const double v = std::pow(spectral_norm(ys[j]), cfg.p);
    vals.push_back(v);
    acc += v;
    res.trace.push_back({r.grid[j], v, acc / static_cast<double>(vals.size())});
  }
  res.n_samples = vals.size();
  const std::size_t nb = cfg.n_batches;
  if (vals.size() < nb) throw InvalidArgument("stationary_moment_estimate: fewer samples than batches");
  const std::size_t per = vals.size() / nb;
  std::vector<double> means;
  for (std::size_t b = 0; b < nb; ++b) {
    double s = 0.0;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) s += vals[i];
    means.push_back(s / static_cast<double>(per));
  }
  res.n_batches = nb;
  res.time_average = detail::mean_and_stderr(means);
  return res;
}

/// Mean of ||Y_T||_2^p over n_paths independent paths at T = horizon.
inline Estimate ensemble_moment_estimate(const ExperimentConfig& cfg) {
  const detail::Resolved r = detail::resolve(cfg, 1);
  if (cfg.n_paths < 2) throw InvalidArgument("ensemble_moment_estimate: n_paths must be >= 2");
  std::vector<double> vals(cfg.n_paths);
  const std::vector<double> end{cfg.horizon};
  parallel_for(cfg.n_paths, cfg.policy, [&](std::size_t i) {
    const JumpTrain train =
        detail::train_or_empty(cfg.spec, cfg.horizon, derive_seed(cfg.seed, "ensemble", i));
    const std::vector<Matrix> ys = states_at(cfg.params, cfg.initial_states.front(), train, end);
    vals[i] = std::pow(spectral_norm(ys.back()), cfg.p);
  });
  return detail::mean_and_stderr(vals);
}

// ---------------------------------------------------------------------------
// Multi-start comparison

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// Asymptotic two-sample KS critical value c(alpha) sqrt((n+m)/(nm)).
inline double ks_critical_value(std::size_t n, std::size_t m, double alpha = 0.01) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

struct KsRow {
  std::size_t start_a = 0;
  std::size_t start_b = 0;
  std::string functional;
  double statistic = 0.0;
};

struct MultiStartResult {
  double max_statistic = 0.0;
  double critical_value = 0.0;  // alpha = 0.01, per comparison
  std::size_t n_per_start = 0;
  std::vector<KsRow> rows;
};

inline const char* const kFunctionals[] = {"spectral_norm", "trace", "lambda_min"};

/// Compares the laws of ||Y_T||_2, tr Y_T and lambda_min(Y_T) across starts
/// via KS statistics (a proxy for total variation). Each start draws its own
/// noise from a seed derived from the start's content, so the statistic does
/// not depend on the order in which starts are listed.
inline MultiStartResult multi_start_convergence(const ExperimentConfig& cfg) {
  detail::resolve(cfg, 3);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& s : cfg.initial_states) {
    lo = std::min(lo, s.matrix().norm());
    hi = std::max(hi, s.matrix().norm());
  }
  if (!(hi >= 100.0 * lo))
    throw InvalidArgument("multi_start_convergence: initial norms must span two orders of magnitude");
  if (cfg.n_paths < 2) throw InvalidArgument("multi_start_convergence: n_paths must be >= 2");

  const std::size_t s = cfg.initial_states.size();
  const std::size_t n = cfg.n_paths;
  const std::vector<double> end{cfg.horizon};
  // samples[start][functional][path]
  std::vector<std::vector<std::vector<double>>> samples(
      s, std::vector<std::vector<double>>(3, std::vector<double>(n)));
  for (std::size_t a = 0; a < s; ++a) {
    const Matrix& y0 = cfg.initial_states[a].matrix();
    std::uint64_t h = detail::fnv1a("start");
    for (double v : to_row_major(y0)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g;", v);
      h = detail::fnv1a(buf, h);
    }
    const std::uint64_t start_seed = derive_seed(cfg.seed, "multistart", h);
    parallel_for(n, cfg.policy, [&](std::size_t i) {
      const JumpTrain train =
          detail::train_or_empty(cfg.spec, cfg.horizon, derive_seed(start_seed, "path", i));
      const Matrix y = states_at(cfg.params, cfg.initial_states[a], train, end).back();
      samples[a][0][i] = spectral_norm(y);
      samples[a][1][i] = y.trace();
      samples[a][2][i] = lambda_min_sym(y);
    });
  }

  MultiStartResult res;
  res.n_per_start = n;
  res.critical_value = ks_critical_value(n, n, 0.01);
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = a + 1; b < s; ++b)
      for (std::size_t f = 0; f < 3; ++f) {
        const double ks = ks_statistic(samples[a][f], samples[b][f]);
        res.rows.push_back({a, b, kFunctionals[f], ks});
        res.max_statistic = std::max(res.max_statistic, ks);
      }
  return res;
}

// ---------------------------------------------------------------------------
// Irreducibility rank probe

struct RankProbeOptions {
  double spacing = 1.0;           // jump i lands uniformly in ((i-1) spacing, i spacing)
  bool allow_singular_a = false;  // permit rank-deficient A (negative control)
  ExecPolicy policy;
};

struct RankProbeResult {
  double frequency = 0.0;
  std::size_t full_rank = 0;
  std::size_t gram_full_rank = 0;  // trials with lambda_min(Gamma) > 1e-12 ||Gamma||_2
  std::size_t n_trials = 0;
  int l = 0;
  double min_relative_lambda = std::numeric_limits<double>::infinity();
  double max_route_discrepancy = 0.0;  // |Gamma - (Y_{t_l} - flow(Y0))| / (1 + ||Y_{t_l}||)
};

/// Simulates exactly l jumps, one per interval of length `spacing`, and
/// checks whether Gamma = Z Z^T, Z = [Z_1 .. Z_l], Z_i = e^{B(t_l - tau_i)} A V_{tau_i-}^{1/2} X_i,
/// has full rank. Rank is read off the singular values of Z
/// (sigma_d(Z) > 1e-12 sigma_1(Z)); the eigenvalue test on Gamma squares the
/// condition number and misreads ill-conditioned draws, so it is only counted
/// in gram_full_rank. Gamma is also compared with Y_{t_l} - e^{B t_l} Y0 e^{B^T t_l}.
inline RankProbeResult irreducibility_rank_probe(const ModelParams& params,
                                                 const CompoundPoissonSpec& spec,
                                                 const PsdMatrix& y0, int l, std::size_t n_trials,
                                                 std::uint64_t seed,
                                                 const RankProbeOptions& opts = {}) {
  if (spec.dim() != params.dim()) throw InvalidArgument("rank probe: noise dimension mismatch");
  if (l < 0) throw InvalidArgument("rank probe: l must be >= 0");
  if (n_trials == 0) throw InvalidArgument("rank probe: n_trials must be positive");
  if (!(opts.spacing > 0.0)) throw InvalidArgument("rank probe: spacing must be > 0");
  if (spec.is_point_mass())
    throw InvalidArgument("rank probe: jump law must be absolutely continuous");
  const Eigen::JacobiSVD<Matrix> svd(params.A());
  const Vector sv = svd.singularValues();
  const bool singular = !(sv(sv.size() - 1) > 1e-12 * std::max(sv(0), 1e-300));
  if (singular && !opts.allow_singular_a) throw InvalidArgument("rank probe: A is singular");

  const int d = params.dim();
  const double tl = l * opts.spacing;
  std::vector<char> full(n_trials, 0), gram_full(n_trials, 0);
  std::vector<double> rel(n_trials, 0.0), disc(n_trials, 0.0);
  parallel_for(n_trials, opts.policy, [&](std::size_t trial) {
    const std::uint64_t s = derive_seed(seed, "rank-probe", trial);
    Engine time_rng = make_engine(s, "jump-times");
    Engine mark_rng = make_engine(s, "jump-marks");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    JumpTrain train;
    train.horizon = tl;
    for (int i = 0; i < l; ++i) {
      double u = unif(time_rng);
      if (u == 0.0) u = 0.5;
      train.times.push_back((i + u) * opts.spacing);
      train.marks.push_back(spec.sample_mark(mark_rng));
    }
    const std::vector<double> grid{tl};
    const SimOptions sim{true, false, true};
    const PathRecord rec = simulate_with_train(params, y0, train, grid, sim);
    Matrix z(d, l);
    std::size_t k = 0;
    for (const auto& e : rec.skeleton) {
      if (e.type != EventType::pre_jump) continue;
      const Matrix v_half = detail::clamped_sqrt(params.C() + e.Y);
      z.col(static_cast<Eigen::Index>(k)) =
          mat_exp(params.B(), tl - train.times[k]) * params.A() * v_half * train.marks[k];
      ++k;
    }
    const Matrix gamma = z * z.transpose();
    const Matrix y_end = rec.skeleton.back().Y;
    const Matrix direct = y_end - detail::flow_raw(params.B(), y0.matrix(), tl);
    disc[trial] = (gamma - direct).norm() / (1.0 + y_end.norm());
    const double top = spectral_norm(gamma);
    const double bottom = lambda_min_sym(0.5 * (gamma + gamma.transpose()));
    rel[trial] = top > 0.0 ? bottom / top : 0.0;
    gram_full[trial] = top > 0.0 && bottom > 1e-12 * top ? 1 : 0;
    if (l >= d) {
      const Vector sz = Eigen::JacobiSVD<Matrix>(z).singularValues();
      full[trial] = sz(0) > 0.0 && sz(d - 1) > 1e-12 * sz(0) ? 1 : 0;
    }
  });

  RankProbeResult res;
  res.n_trials = n_trials;
  res.l = l;
  for (std::size_t t = 0; t < n_trials; ++t) {
    res.full_rank += full[t];
    res.gram_full_rank += gram_full[t];
    res.min_relative_lambda = std::min(res.min_relative_lambda, rel[t]);
    res.max_route_discrepancy = std::max(res.max_route_discrepancy, disc[t]);
  }
  res.frequency = static_cast<double>(res.full_rank) / static_cast<double>(n_trials);
  return res;
}

// ---------------------------------------------------------------------------
// Aperiodicity: no-jump return into {||x||_2 <= K}

struct AperiodicityResult {
  double delta = 0.0;               // decay rate used in ||e^{Bt}|| <= C e^{-delta t}
  double transient_constant = 1.0; // fitted C >= 1
  double return_time = 0.0;         // ln(C) / delta
  std::size_t n_checked = 0;
  std::size_t violations = 0;
};

/// Fits ||e^{Bt}||_2 <= C e^{-delta t} over t_grid with delta = -max Re sigma(B)
/// for normal B and half of it otherwise, and returns the time after which
/// ||e^{Bt} x e^{B^T t}||_2 <= C^2 e^{-2 delta t} K <= K. The bound is checked
/// at every grid time past it on random states with ||x||_2 <= K and on the
/// worst-case rank-one state K v v^T.
inline AperiodicityResult aperiodicity_flow_check(const ModelParams& params, double K,
                                                  std::span<const double> t_grid,
                                                  std::size_t n_samples = 200,
                                                  std::uint64_t seed = 0) {
  if (!params.stable()) throw InvalidArgument("aperiodicity check: B must be stable");
  if (!(K > 0.0)) throw InvalidArgument("aperiodicity check: K must be > 0");
  if (t_grid.empty()) throw InvalidArgument("aperiodicity check: empty time grid");
  const Matrix& b = params.B();
  const double lambda = params.spectral_abscissa_B();
  const double comm = (b * b.transpose() - b.transpose() * b).norm();
  const bool normal = comm <= 1e-12 * std::max(1.0, b.squaredNorm());

  AperiodicityResult res;
  res.delta = normal ? -lambda : -0.5 * lambda;
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw InvalidArgument("aperiodicity check: times must be >= 0");
    res.transient_constant =
        std::max(res.transient_constant, spectral_norm(mat_exp(b, t)) * std::exp(res.delta * t));
  }
  if (normal) res.transient_constant = 1.0;
  res.return_time = std::log(res.transient_constant) / res.delta;

  const int d = params.dim();
  std::vector<Matrix> probes;
  {
    Engine rng = make_engine(seed, "aperiodicity");
    std::normal_distribution<double> normal_dist;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < n_samples; ++i) {
      Matrix g(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) g(r, c) = normal_dist(rng);
      const Matrix w = g * g.transpose();
      const double nw = spectral_norm(w);
      if (nw > 0.0) probes.push_back(K * unif(rng) * w / nw);
    }
  }
  for (double t : t_grid) {
    if (t < res.return_time) continue;
    const Matrix e = mat_exp(b, t);
    const Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeFullV);
    const Vector v = svd.matrixV().col(0);
    std::vector<Matrix> xs = probes;
    xs.push_back(K * v * v.transpose());
    for (const auto& x : xs) {
      ++res.n_checked;
      if (spectral_norm(Matrix(e * x * e.transpose())) > K * (1.0 + 1e-12)) ++res.violations;
    }
  }
  return res;
}

}  // namespace mucogarch

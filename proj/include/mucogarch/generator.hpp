#pragma once

// Extended generator of the vectorized volatility process applied to the
// test function u(x) = ||x||_2^p + 1, plus numerical checks built on it:
// Foster-Lyapunov drift fit, Dynkin difference quotient, Gronwall bound.
//
//   Au(x) = Du(x) + Ju(x)
//   Du(x) = (Bx)^T x p ||x||^{p-2},            Bx = vec(BY + YB^T)
//   Ju(x) = rate * E[u(x + vec(w w^T)) - u(x)],  w = A (C+Y)^{1/2} X

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "mucogarch/errors.hpp"
#include "mucogarch/levy.hpp"
#include "mucogarch/matcore.hpp"
#include "mucogarch/parallel.hpp"
#include "mucogarch/process.hpp"
#include "mucogarch/rng.hpp"

namespace mucogarch {

inline double u_fn(const Vector& x, double p) { return std::pow(x.norm(), p) + 1.0; }
inline double u_fn(const Matrix& y, double p) { return std::pow(y.norm(), p) + 1.0; }

struct GeneratorEval {
  Vector x;
  double p = 0.0;
  double drift_part = 0.0;
  Estimate jump_part;
  Estimate total;
};

namespace detail {

inline void check_order(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("order p must be finite and > 0");
}

inline Matrix state_from_vec(const Vector& x) {
  const Matrix y = unvec(x, vec_dim(x));
  if (!is_psd(0.5 * (y + y.transpose())) || (y - y.transpose()).norm() > 1e-12 * (1.0 + y.norm()))
    throw NotPsdError("state is not the vec of a PSD matrix");
  return 0.5 * (y + y.transpose());
}

/// ||Y + w w^T||_F^p - ||Y||_F^p without cancellation:
/// ||Y + ww^T||^2 = ||Y||^2 + delta, delta = 2 w^T Y w + ||w||^4.
inline double u_increment(const Matrix& y, const Vector& w, double p) {
  const double n2 = y.squaredNorm();
  const double ww = w.squaredNorm();
  const double delta = 2.0 * w.dot(y * w) + ww * ww;
  if (n2 == 0.0) return std::pow(std::max(delta, 0.0), 0.5 * p);
  return std::pow(n2, 0.5 * p) * std::expm1(0.5 * p * std::log1p(delta / n2));
}

}  // namespace detail

/// Du(x). Defined as 0 at x = 0 (continuous extension for p < 2).
inline double drift_part(const ModelParams& params, const Vector& x, double p) {
  detail::check_order(p);
  if (x.size() != params.dim() * params.dim())
    throw InvalidArgument("drift_part: state has wrong dimension");
  const double n = x.norm();
  if (n == 0.0) return 0.0;
  const double bxx = (kron_sum(params.B()) * x).dot(x);
  return bxx * p * std::pow(n, p - 2.0);
}

/// Ju(x) by Monte Carlo over n_mc marks (exact for point-mass laws).
inline Estimate jump_part(const ModelParams& params, const CompoundPoissonSpec& spec,
                          const Vector& x, double p, long n_mc, std::uint64_t seed) {
  detail::check_order(p);
  if (spec.dim() != params.dim()) throw InvalidArgument("jump_part: noise dimension mismatch");
  if (x.size() != params.dim() * params.dim())
    throw InvalidArgument("jump_part: state has wrong dimension");
  const Matrix y = detail::state_from_vec(x);
  const Matrix v_half = detail::clamped_sqrt(params.C() + y);
  const Matrix av = params.A() * v_half;
  const double floor = -1e-12 * (1.0 + std::pow(x.norm(), p));
  return levy_integral(
      spec,
      [&](const Vector& mark) {
        const double inc = detail::u_increment(y, av * mark, p);
        if (inc < floor) throw NumericalDefect("jump_part: negative increment of u");
        return std::max(inc, 0.0);
      },
      n_mc, seed);
}

inline GeneratorEval extended_generator(const ModelParams& params,
                                        const CompoundPoissonSpec& spec, const Vector& x,
                                        double p, long n_mc, std::uint64_t seed) {
  GeneratorEval g;
  g.x = x;
  g.p = p;
  g.jump_part = jump_part(params, spec, x, p, n_mc, seed);
  g.drift_part = drift_part(params, x, p);
  g.total = {g.drift_part + g.jump_part.value, g.jump_part.std_error};
  return g;
}

inline GeneratorEval extended_generator(const ModelParams& params,
                                        const CompoundPoissonSpec& spec, const PsdMatrix& y,
                                        double p, long n_mc, std::uint64_t seed) {
  return extended_generator(params, spec, vec(y.matrix()), p, n_mc, seed);
}

/// Constants of the global bounds
///   Ju(x) <= ||x||^p I1 + dbar,  |Au(x)| <= c2 u(x),
/// with I1 = int (f_p (1 + a ||z||)^p - 1) nu_vec(dz), a = ||A (x) A||_2,
/// dbar = f_p a^p ||C||_2^p int ||z||^p nu_vec(dz), f_p = 2^{p-1} for p >= 1 else 1.
struct GrowthConstants {
  double p = 0.0;
  double m_max = 0.0;
  double m_min = 0.0;
  double norm_AA = 0.0;
  Estimate jump_coeff;  // I1
  Estimate dbar;
  double c2 = 0.0;
  bool reliable = true;  // relative stderr of dbar within 10%
};

inline GrowthConstants growth_constants(const ModelParams& params,
                                        const CompoundPoissonSpec& spec, double p, long n_mc,
                                        std::uint64_t seed) {
  detail::check_order(p);
  GrowthConstants g;
  g.p = p;
  g.m_max = numerical_range_max(params.B());
  g.m_min = numerical_range_min(params.B());
  g.norm_AA = spectral_norm(kron(params.A(), params.A()));
  const double a = g.norm_AA;
  const double fp = p >= 1.0 ? std::pow(2.0, p - 1.0) : 1.0;
  g.jump_coeff = levy_integral(
      spec, [&](const Vector& y) { return fp * std::pow(1.0 + a * y.squaredNorm(), p) - 1.0; },
      n_mc, seed);
  const double scale = fp * std::pow(a * spectral_norm(params.C()), p);
  const Estimate zp = levy_integral(
      spec, [&](const Vector& y) { return std::pow(y.squaredNorm(), p); }, n_mc, seed);
  g.dbar = {scale * zp.value, scale * zp.std_error};
  g.reliable = g.dbar.value == 0.0 || g.dbar.std_error <= 0.1 * g.dbar.value;
  const double i1_hi = g.jump_coeff.value + 3.0 * g.jump_coeff.std_error;
  const double dbar_hi = g.dbar.value + 3.0 * g.dbar.std_error;
  g.c2 = std::max(std::max(std::abs(g.m_min), std::abs(g.m_max)) * p + std::max(i1_hi, 0.0),
                  dbar_hi);
  return g;
}

/// Right-hand side ||x||^p I1 + dbar of the jump-part bound.
inline double jump_bound(const GrowthConstants& g, const Vector& x) {
  return std::pow(x.norm(), g.p) * g.jump_coeff.value + g.dbar.value;
}

// ---------------------------------------------------------------------------
// State sampling

struct StateSampler {
  double radius = 1000.0;  // ||x||_2 = ||Y||_F drawn uniformly in [0, radius]
};

/// PSD states with Frobenius norm uniform in [0, radius]; the direction is a
/// sum of m random rank-one terms, m uniform in {1..d}, so low-rank boundary
/// states of the cone are sampled as often as interior ones.
inline std::vector<Matrix> sample_states(int dim, std::size_t n, const StateSampler& sampler,
                                         std::uint64_t seed) {
  if (dim <= 0) throw InvalidArgument("sample_states: dim must be positive");
  if (!(sampler.radius > 0.0)) throw InvalidArgument("sample_states: radius must be > 0");
  Engine rng = make_engine(seed, "state-sampler");
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> rank(1, dim);
  std::vector<Matrix> out;
  out.reserve(n);
  while (out.size() < n) {
    Matrix w = Matrix::Zero(dim, dim);
    const int m = rank(rng);
    for (int j = 0; j < m; ++j) {
      Vector g(dim);
      for (int i = 0; i < dim; ++i) g(i) = normal(rng);
      w += g * g.transpose();
    }
    const double nw = w.norm();
    if (nw == 0.0) continue;
    out.push_back(sampler.radius * unif(rng) * w / nw);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Foster-Lyapunov drift fit

struct DriftScanRow {
  double norm = 0.0;
  double Au = 0.0;
  double Au_stderr = 0.0;
  double u = 0.0;
  double slack = 0.0;  // -c1 u + e 1{||x|| <= k} - (Au + 3 se); >= 0 where the fit holds
};

struct DriftFitReport {
  double p = 0.0;
  std::size_t n_states = 0;
  double c1 = 0.0;
  double e = 0.0;
  double k = 0.0;
  std::size_t violations = 0;
  bool verified = false;
  bool exploratory = false;
  std::vector<DriftScanRow> rows;
};

struct ScanOptions {
  StateSampler sampler;
  std::size_t n_states = 10000;
  long n_mc = 2000;
  bool exploratory = false;  // set when the geometric-ergodicity verdict is not yes
  ExecPolicy policy;
};

/// Petite radii tried in increasing order: 1, 2, 5, 10, 20, 50, ... below radius.
inline std::vector<double> petite_radius_grid(double radius) {
  std::vector<double> ks;
  for (double scale = 1.0; scale < radius; scale *= 10.0)
    for (double m : {1.0, 2.0, 5.0})
      if (m * scale < radius) ks.push_back(m * scale);
  return ks;
}

/// Samples states, evaluates Au at each and fits Au <= -c1 u + e 1_{D_k}
/// (with Au replaced by Au + 3 se). For every k the largest c1 is taken from
/// the states outside D_k and the smallest e from those inside; the smallest
/// feasible k is reported.
inline DriftFitReport foster_lyapunov_scan(const ModelParams& params,
                                           const CompoundPoissonSpec& spec, double p,
                                           const ScanOptions& opts, std::uint64_t seed) {
  detail::check_order(p);
  const std::vector<Matrix> states =
      sample_states(params.dim(), opts.n_states, opts.sampler, derive_seed(seed, "scan-states"));
  std::vector<DriftScanRow> rows(states.size());
  parallel_for(states.size(), opts.policy, [&](std::size_t i) {
    const Vector x = vec(states[i]);
    const GeneratorEval g =
        extended_generator(params, spec, x, p, opts.n_mc, derive_seed(seed, "scan-mc", i));
    rows[i] = {x.norm(), g.total.value, g.total.std_error, u_fn(x, p), 0.0};
  });

  DriftFitReport rep;
  rep.p = p;
  rep.n_states = rows.size();
  rep.exploratory = opts.exploratory;
  const auto upper = [](const DriftScanRow& r) { return r.Au + 3.0 * r.Au_stderr; };

  const std::vector<double> ks = petite_radius_grid(opts.sampler.radius);
  bool found = false;
  for (double k : ks) {
    double c1 = std::numeric_limits<double>::infinity();
    bool any_outside = false;
    for (const auto& r : rows)
      if (r.norm > k) {
        any_outside = true;
        c1 = std::min(c1, -upper(r) / r.u);
      }
    if (!any_outside || !(c1 > 0.0)) continue;
    double e = 0.0;
    for (const auto& r : rows)
      if (r.norm <= k) e = std::max(e, upper(r) + c1 * r.u);
    rep.c1 = c1;
    rep.e = e;
    rep.k = k;
    found = true;
    break;
  }
  if (!found) {
    rep.k = ks.empty() ? 0.0 : ks.back();
    rep.c1 = 0.0;
    double e = 0.0;
    for (const auto& r : rows)
      if (r.norm <= rep.k) e = std::max(e, upper(r));
    rep.e = e;
  }
  for (auto& r : rows) {
    const double indicator = r.norm <= rep.k ? rep.e : 0.0;
    r.slack = -rep.c1 * r.u + indicator - upper(r);
    if (r.norm > rep.k && (found ? r.slack < 0.0 : upper(r) >= 0.0)) ++rep.violations;
  }
  rep.verified = found && rep.violations == 0;
  rep.rows = std::move(rows);
  return rep;
}

// ---------------------------------------------------------------------------
// Dynkin difference quotient

struct DynkinResult {
  double h = 0.0;
  Estimate difference_quotient;
  Estimate generator;
  double discrepancy = 0.0;          // |DQ - Au|
  double discrepancy_stderr = 0.0;   // from both MC estimates
  double relative_discrepancy = 0.0; // discrepancy / (1 + |Au|)
};

struct DynkinOptions {
  std::size_t n_paths = 100000;
  long n_mc = 100000;
  ExecPolicy policy;
};

/// (E_x u(Y_h) - u(x)) / h against Au(x). The expectation is split on the jump
/// count N_h: the N_h = 0 part is the deterministic flow with weight e^{-rh};
/// paths are drawn conditionally on N_h >= 1 (zero-truncated Poisson).
inline DynkinResult dynkin_check(const ModelParams& params, const CompoundPoissonSpec& spec,
                                 const PsdMatrix& y0, double p, double h,
                                 const DynkinOptions& opts, std::uint64_t seed) {
  detail::check_order(p);
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("dynkin_check: h must be > 0");
  const double u0 = u_fn(y0.matrix(), p);
  const double u_flow = u_fn(detail::flow_raw(params.B(), y0.matrix(), h), p);
  const double mu = spec.rate() * h;
  const double p0 = std::exp(-mu);

  Estimate dq{(u_flow - u0) / h, 0.0};
  if (mu > 0.0) {
    if (opts.n_paths < 2) throw InvalidArgument("dynkin_check: n_paths must be >= 2");
    std::vector<double> gains(opts.n_paths);
    const std::vector<double> end{h};
    parallel_for(opts.n_paths, opts.policy, [&](std::size_t i) {
      const std::uint64_t s = derive_seed(seed, "dynkin-path", i);
      Engine rng = make_engine(s, "jump-count");
      std::uniform_real_distribution<double> unif(p0, 1.0);
      const double target = unif(rng);
      std::size_t n = 0;
      double pk = p0;
      double cdf = p0;
      while (cdf < target && n < 100000) {
        ++n;
        pk *= mu / static_cast<double>(n);
        cdf += pk;
      }
      n = std::max<std::size_t>(n, 1);
      const JumpTrain train = sample_train_with_count(spec, h, n, s);
      const std::vector<Matrix> y = states_at(params, y0, train, end);
      gains[i] = u_fn(y.back(), p) - u0;
    });
    double sum = 0.0;
    for (double g : gains) sum += g;
    const double n = static_cast<double>(gains.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (double g : gains) ss += (g - mean) * (g - mean);
    const double se = std::sqrt(ss / (n - 1.0) / n);
    dq.value = (p0 * (u_flow - u0) + (1.0 - p0) * mean) / h;
    dq.std_error = (1.0 - p0) * se / h;
  }

  DynkinResult r;
  r.h = h;
  r.difference_quotient = dq;
  r.generator = extended_generator(params, spec, y0, p, opts.n_mc, derive_seed(seed, "dynkin-generator")).total;
  r.discrepancy = std::abs(dq.value - r.generator.value);
  r.discrepancy_stderr = std::hypot(dq.std_error, r.generator.std_error);
  r.relative_discrepancy = r.discrepancy / (1.0 + std::abs(r.generator.value));
  return r;
}

struct DynkinSweep {
  std::vector<DynkinResult> results;
  std::vector<double> c_low;   // max(D - 3 se, 0) / h
  std::vector<double> c_high;  // (D + 3 se) / h
  double fitted_C = 0.0;       // smallest C with D <= C h + 3 se at every h
  bool stable = false;         // fitted C within a factor 2 of every per-h upper bound
  bool passed = false;
};

/// Runs dynkin_check over several h and tests discrepancy <= C h + 3 se with
/// one C for all h. The generator estimate uses the same seed at every h.
inline DynkinSweep dynkin_rate_check(const ModelParams& params, const CompoundPoissonSpec& spec,
                                     const PsdMatrix& y0, double p, std::span<const double> hs,
                                     const DynkinOptions& opts, std::uint64_t seed) {
  if (hs.empty()) throw InvalidArgument("dynkin_rate_check: need at least one h");
  DynkinSweep sw;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    DynkinResult r = dynkin_check(params, spec, y0, p, hs[i], opts, derive_seed(seed, "dynkin-h", i));
    const double lo = std::max(r.discrepancy - 3.0 * r.discrepancy_stderr, 0.0) / r.h;
    const double hi = (r.discrepancy + 3.0 * r.discrepancy_stderr) / r.h;
    sw.c_low.push_back(lo);
    sw.c_high.push_back(hi);
    sw.fitted_C = std::max(sw.fitted_C, lo);
    sw.results.push_back(r);
  }
  const double min_hi = *std::min_element(sw.c_high.begin(), sw.c_high.end());
  sw.stable = sw.fitted_C <= 2.0 * min_hi + 1e-12;
  bool within = true;
  for (const auto& r : sw.results)
    if (r.discrepancy > sw.fitted_C * r.h + 3.0 * r.discrepancy_stderr + 1e-12) within = false;
  sw.passed = within && sw.stable;
  return sw;
}

// ---------------------------------------------------------------------------
// Gronwall bound

struct GronwallRow {
  double t = 0.0;
  Estimate mean_u;
  double bound = 0.0;  // u(x) e^{c2 t}
  double ratio = 0.0;
  double ratio_stderr = 0.0;
};

struct GronwallResult {
  GrowthConstants constants;
  std::vector<GronwallRow> rows;
  double max_ratio = 0.0;
  bool passed = false;  // ratio <= 1 + 3 stderr (+1e-12 rounding) at every t
};

struct GronwallOptions {
  std::size_t n_paths = 10000;
  long n_mc = 100000;
  ExecPolicy policy;
};

inline GronwallResult gronwall_check(const ModelParams& params, const CompoundPoissonSpec& spec,
                                     const PsdMatrix& y0, double p,
                                     std::span<const double> t_grid,
                                     const GronwallOptions& opts, std::uint64_t seed) {
  detail::check_order(p);
  if (t_grid.empty()) throw InvalidArgument("gronwall_check: empty time grid");
  if (opts.n_paths < 2) throw InvalidArgument("gronwall_check: n_paths must be >= 2");
  std::vector<double> grid(t_grid.begin(), t_grid.end());
  std::sort(grid.begin(), grid.end());
  if (!(grid.front() >= 0.0)) throw InvalidArgument("gronwall_check: times must be >= 0");
  const double horizon = std::max(grid.back(), 1e-300);

  GronwallResult res;
  res.constants = growth_constants(params, spec, p, opts.n_mc, derive_seed(seed, "gronwall-constants"));
  const std::size_t m = grid.size();
  std::vector<double> values(opts.n_paths * m);
  parallel_for(opts.n_paths, opts.policy, [&](std::size_t i) {
    const JumpTrain train = sample_jump_train(spec, horizon, derive_seed(seed, "gronwall-path", i));
    const std::vector<Matrix> ys = states_at(params, y0, train, grid);
    for (std::size_t j = 0; j < m; ++j) values[i * m + j] = u_fn(ys[j], p);
  });

  const double u0 = u_fn(y0.matrix(), p);
  const double n = static_cast<double>(opts.n_paths);
  res.passed = true;
  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < opts.n_paths; ++i) sum += values[i * m + j];
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < opts.n_paths; ++i) {
      const double dv = values[i * m + j] - mean;
      ss += dv * dv;
    }
    GronwallRow row;
    row.t = grid[j];
    row.mean_u = {mean, std::sqrt(ss / (n - 1.0) / n)};
    row.bound = u0 * std::exp(res.constants.c2 * grid[j]);
    row.ratio = mean / row.bound;
    row.ratio_stderr = row.mean_u.std_error / row.bound;
    res.max_ratio = std::max(res.max_ratio, row.ratio);
    if (row.ratio > 1.0 + 3.0 * row.ratio_stderr + 1e-12) res.passed = false;
    res.rows.push_back(row);
  }
  return res;
}

}  // namespace mucogarch

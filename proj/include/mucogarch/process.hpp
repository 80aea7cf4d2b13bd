#pragma once

// Exact event-driven simulation of the MUCOGARCH(1,1) volatility process
//
//   dY_t = (B Y_{t-} + Y_{t-} B^T) dt + A V_{t-}^{1/2} d[L,L]^d_t V_{t-}^{1/2} A^T,
//   V_t  = C + Y_t,
//
// for compound Poisson L. Between jumps Y follows the linear flow
// e^{B s} Y e^{B^T s}; at a jump with mark x it gains A V^{1/2} x x^T V^{1/2} A^T.
// No time discretization is involved.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mucogarch/errors.hpp"
#include "mucogarch/levy.hpp"
#include "mucogarch/matcore.hpp"

namespace mucogarch {

/// Parameters (A, B, C) of the MUCOGARCH(1,1) system. C must be positive
/// definite; B may be unstable (simulation does not need stability).
class ModelParams {
 public:
  ModelParams(Matrix a, Matrix b, PsdMatrix c)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    const Eigen::Index d = c_.matrix().rows();
    if (a_.rows() != d || a_.cols() != d || b_.rows() != d || b_.cols() != d)
      throw InvalidArgument("ModelParams: A, B and C must all be d x d");
    if (!a_.allFinite() || !b_.allFinite())
      throw InvalidArgument("ModelParams: non-finite entry in A or B");
    const double lmin = lambda_min_sym(c_.matrix());
    if (!(lmin > 1e-12 * spectral_norm(c_.matrix())))
      throw InvalidArgument("ModelParams: C must be positive definite");
    abscissa_ = spectral_abscissa(b_);
  }

  int dim() const { return static_cast<int>(b_.rows()); }
  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  const Matrix& C() const { return c_.matrix(); }
  const PsdMatrix& C_psd() const { return c_; }

  /// max Re sigma(B).
  double spectral_abscissa_B() const { return abscissa_; }
  bool stable() const { return abscissa_ < 0.0; }

 private:
  Matrix a_;
  Matrix b_;
  PsdMatrix c_;
  double abscissa_ = 0.0;
};

enum class EventType { grid, pre_jump, post_jump };

inline const char* to_string(EventType t) {
  switch (t) {
    case EventType::grid: return "grid";
    case EventType::pre_jump: return "pre_jump";
    default: return "post_jump";
  }
}

struct PathEvent {
  double time = 0.0;
  EventType type = EventType::grid;
  Matrix Y;
};

struct GSample {
  double time = 0.0;
  Vector G;
};

/// Full event log of one simulated path.
struct PathRecord {
  ModelParams params;
  Matrix Y0;
  JumpTrain train;
  std::vector<PathEvent> skeleton;  // grid states plus pre/post state at every jump
  std::vector<GSample> g_samples;   // log-price at grid times when tracked

  std::vector<const PathEvent*> grid_events() const {
    std::vector<const PathEvent*> out;
    for (const auto& e : skeleton)
      if (e.type == EventType::grid) out.push_back(&e);
    return out;
  }
};

struct SimOptions {
  bool record_jumps = true;      // log pre_jump / post_jump states
  bool track_g = false;          // accumulate G via dG = V^{1/2} dL
  bool check_invariants = true;  // PSD check at every logged state
};

namespace detail {

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline Matrix flow_raw(const Matrix& b, const Matrix& y, double dt) {
  if (dt == 0.0) return y;
  const Matrix e = mat_exp(b, dt);
  return symmetrize(e * y * e.transpose());
}

inline void check_state(const Matrix& y, double t) {
  const double lmin = lambda_min_sym(y);
  if (lmin < -1e-10 * (1.0 + spectral_norm(y)))
    throw NumericalDefect("volatility state left the PSD cone at t = " + std::to_string(t));
}

/// A (C+Y)^{1/2} x together with (C+Y)^{1/2} x.
struct JumpFactor {
  Vector w;
  Vector v_half_x;
};

inline JumpFactor jump_factor(const ModelParams& params, const Matrix& y, const Vector& x) {
  const Matrix v_half = clamped_sqrt(params.C() + y);
  JumpFactor out;
  out.v_half_x = v_half * x;
  out.w = params.A() * out.v_half_x;
  return out;
}

}  // namespace detail

/// e^{B dt} Y e^{B^T dt}.
inline PsdMatrix flow(const ModelParams& params, const PsdMatrix& y, double dt) {
  if (!(dt >= 0.0)) throw InvalidArgument("flow: dt must be >= 0");
  return PsdMatrix(detail::flow_raw(params.B(), y.matrix(), dt));
}

/// Y + A (C+Y)^{1/2} x x^T (C+Y)^{1/2} A^T.
inline PsdMatrix apply_jump(const ModelParams& params, const PsdMatrix& y, const Vector& x) {
  if (x.size() != params.dim()) throw InvalidArgument("apply_jump: mark has wrong dimension");
  const auto f = detail::jump_factor(params, y.matrix(), x);
  return PsdMatrix(Matrix(y.matrix() + f.w * f.w.transpose()));
}

/// Simulates along a given jump train. Grid points are visited in ascending
/// order; at a grid time that coincides with a jump the post-jump state is
/// recorded (Y is cadlag). Pre-jump states are the flowed left limits.
inline PathRecord simulate_with_train(const ModelParams& params, const PsdMatrix& y0,
                                      const JumpTrain& train, std::span<const double> grid,
                                      const SimOptions& opts = {}) {
  if (y0.dim() != params.dim()) throw InvalidArgument("simulate: Y0 has wrong dimension");
  std::vector<double> g(grid.begin(), grid.end());
  std::sort(g.begin(), g.end());
  for (double t : g)
    if (!(t >= 0.0) || !std::isfinite(t))
      throw InvalidArgument("simulate: grid times must be finite and >= 0");
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.marks[i].size() != params.dim())
      throw InvalidArgument("simulate: jump mark has wrong dimension");
    if (!(train.times[i] > 0.0) || (i > 0 && !(train.times[i] > train.times[i - 1])))
      throw InvalidArgument("simulate: jump times must be positive and strictly increasing");
  }

  PathRecord rec{params, y0.matrix(), train, {}, {}};
  rec.skeleton.reserve(g.size() + (opts.record_jumps ? 2 * train.size() : 0));
  Matrix y = y0.matrix();
  Vector gp = Vector::Zero(params.dim());
  double now = 0.0;
  std::size_t j = 0;
  std::size_t k = 0;
  while (j < train.size() || k < g.size()) {
    const bool jump_next = j < train.size() && (k == g.size() || train.times[j] <= g[k]);
    if (jump_next) {
      const double tau = train.times[j];
      y = detail::flow_raw(params.B(), y, tau - now);
      now = tau;
      if (opts.check_invariants) detail::check_state(y, now);
      if (opts.record_jumps) rec.skeleton.push_back({now, EventType::pre_jump, y});
      const auto f = detail::jump_factor(params, y, train.marks[j]);
      y = detail::symmetrize(y + f.w * f.w.transpose());
      if (opts.track_g) gp += f.v_half_x;
      if (opts.record_jumps) rec.skeleton.push_back({now, EventType::post_jump, y});
      ++j;
    } else {
      const double t = g[k];
      y = detail::flow_raw(params.B(), y, t - now);
      now = t;
      if (opts.check_invariants) detail::check_state(y, now);
      rec.skeleton.push_back({now, EventType::grid, y});
      if (opts.track_g) rec.g_samples.push_back({now, gp});
      ++k;
    }
  }
  return rec;
}

/// Samples a compound Poisson train on (0, horizon] and simulates along it.
inline PathRecord simulate_path(const ModelParams& params, const CompoundPoissonSpec& spec,
                                const PsdMatrix& y0, double horizon,
                                std::span<const double> grid, std::uint64_t seed,
                                const SimOptions& opts = {}) {
  if (spec.dim() != params.dim())
    throw InvalidArgument("simulate_path: noise dimension differs from model dimension");
  for (double t : grid)
    if (t > horizon) throw InvalidArgument("simulate_path: grid exceeds horizon");
  return simulate_with_train(params, y0, sample_jump_train(spec, horizon, seed), grid, opts);
}

/// Y at the grid times only (no jump logging, no invariant checks).
inline std::vector<Matrix> states_at(const ModelParams& params, const PsdMatrix& y0,
                                     const JumpTrain& train, std::span<const double> grid) {
  const SimOptions opts{false, false, false};
  const PathRecord rec = simulate_with_train(params, y0, train, grid, opts);
  std::vector<Matrix> out;
  out.reserve(rec.skeleton.size());
  for (const auto& e : rec.skeleton) out.push_back(e.Y);
  return out;
}

/// Recomputes Y at every grid time from the integral representation
///   Y_t = e^{Bt} Y0 e^{B^T t}
///       + sum_{tau_k <= t} e^{B(t-tau_k)} A V_k^{1/2} x_k x_k^T V_k^{1/2} A^T e^{B^T(t-tau_k)},
/// V_k = C + Y_{tau_k-}, and returns the largest Frobenius discrepancy against
/// the simulated skeleton.
inline double reconstruct_path(const PathRecord& rec) {
  std::vector<const PathEvent*> pre;
  for (const auto& e : rec.skeleton)
    if (e.type == EventType::pre_jump) pre.push_back(&e);
  if (pre.size() != rec.train.size())
    throw InvalidArgument("reconstruct_path: record lacks pre-jump states");

  const ModelParams& p = rec.params;
  std::vector<Matrix> increments;
  increments.reserve(pre.size());
  for (std::size_t k = 0; k < pre.size(); ++k) {
    const Matrix v_half = detail::clamped_sqrt(p.C() + pre[k]->Y);
    const Vector w = p.A() * v_half * rec.train.marks[k];
    increments.push_back(w * w.transpose());
  }

  double worst = 0.0;
  for (const auto& e : rec.skeleton) {
    if (e.type != EventType::grid) continue;
    const Matrix et = mat_exp(p.B(), e.time);
    Matrix y = et * rec.Y0 * et.transpose();
    for (std::size_t k = 0; k < pre.size() && rec.train.times[k] <= e.time; ++k) {
      const Matrix ek = mat_exp(p.B(), e.time - rec.train.times[k]);
      y += ek * increments[k] * ek.transpose();
    }
    worst = std::max(worst, (y - e.Y).norm());
  }
  return worst;
}

/// Frobenius norm of vec-state == ||vec(Y)||_2.
inline double vec_norm(const Matrix& y) { return y.norm(); }

}  // namespace mucogarch

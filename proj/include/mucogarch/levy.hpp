#pragma once

// Compound Poisson driving noise: jump laws, seeded jump trains, and
// integrals against the Levy measure nu = rate * jump_law.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "mucogarch/errors.hpp"
#include "mucogarch/matcore.hpp"
#include "mucogarch/rng.hpp"

namespace mucogarch {

/// N(0, sigma^2 I_d).
struct GaussianLaw {
  double sigma = 1.0;
};

/// Uniform on the centered ball of the given radius.
struct BallUniformLaw {
  double radius = 1.0;
};

/// sum_i weights[i] * delta_{atoms[i]}.
struct PointMassMixture {
  std::vector<Vector> atoms;
  std::vector<double> weights;
};

/// N(0, sigma^2 I_d) conditioned on ||x|| <= radius.
struct TruncatedGaussianLaw {
  double sigma = 1.0;
  double radius = 1.0;
};

using JumpLaw = std::variant<GaussianLaw, BallUniformLaw, PointMassMixture,
                             TruncatedGaussianLaw>;

inline std::string law_name(const JumpLaw& law) {
  switch (law.index()) {
    case 0: return "gaussian";
    case 1: return "ball_uniform";
    case 2: return "point_mass";
    default: return "truncated_gaussian";
  }
}

/// Compound Poisson process in R^d: jump intensity `rate` and i.i.d. marks.
/// rate == 0 is accepted and means "no jumps".
class CompoundPoissonSpec {
 public:
  CompoundPoissonSpec(double rate, JumpLaw law, int dim)
      : rate_(rate), law_(std::move(law)), dim_(dim) {
    if (dim <= 0) throw InvalidArgument("CompoundPoissonSpec: dim must be positive");
    if (!(rate >= 0.0) || !std::isfinite(rate))
      throw InvalidArgument("CompoundPoissonSpec: rate must be finite and >= 0");
    std::visit([this](const auto& l) { validate(l); }, law_);
  }

  double rate() const { return rate_; }
  const JumpLaw& law() const { return law_; }
  int dim() const { return dim_; }
  bool is_point_mass() const { return std::holds_alternative<PointMassMixture>(law_); }

  /// Copy with a different intensity.
  CompoundPoissonSpec with_rate(double rate) const {
    return CompoundPoissonSpec(rate, law_, dim_);
  }

  /// One i.i.d. draw from the jump law.
  Vector sample_mark(Engine& rng) const {
    return std::visit([&](const auto& l) { return draw(l, rng); }, law_);
  }

 private:
  void validate(const GaussianLaw& l) const {
    if (!(l.sigma > 0.0)) throw InvalidArgument("gaussian law: sigma must be > 0");
  }
  void validate(const BallUniformLaw& l) const {
    if (!(l.radius > 0.0)) throw InvalidArgument("ball_uniform law: radius must be > 0");
  }
  void validate(const TruncatedGaussianLaw& l) const {
    if (!(l.sigma > 0.0) || !(l.radius > 0.0))
      throw InvalidArgument("truncated_gaussian law: sigma and radius must be > 0");
  }
  void validate(const PointMassMixture& l) const {
    if (l.atoms.empty() || l.atoms.size() != l.weights.size())
      throw InvalidArgument("point_mass law: need equally many atoms and weights");
    double total = 0.0;
    for (std::size_t i = 0; i < l.atoms.size(); ++i) {
      if (l.atoms[i].size() != dim_)
        throw InvalidArgument("point_mass law: atom dimension differs from dim");
      if (!l.atoms[i].allFinite()) throw InvalidArgument("point_mass law: non-finite atom");
      if (!(l.weights[i] > 0.0)) throw InvalidArgument("point_mass law: weights must be > 0");
      total += l.weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw InvalidArgument("point_mass law: weights must sum to 1");
  }

  Vector gaussian(Engine& rng, double sigma) const {
    std::normal_distribution<double> normal(0.0, sigma);
    Vector x(dim_);
    for (int i = 0; i < dim_; ++i) x(i) = normal(rng);
    return x;
  }
  Vector draw(const GaussianLaw& l, Engine& rng) const { return gaussian(rng, l.sigma); }
  Vector draw(const BallUniformLaw& l, Engine& rng) const {
    Vector dir = gaussian(rng, 1.0);
    while (dir.norm() == 0.0) dir = gaussian(rng, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double r = l.radius * std::pow(unif(rng), 1.0 / dim_);
    return r * dir / dir.norm();
  }
  Vector draw(const PointMassMixture& l, Engine& rng) const {
    if (l.atoms.size() == 1) return l.atoms.front();
    std::discrete_distribution<std::size_t> pick(l.weights.begin(), l.weights.end());
    return l.atoms[pick(rng)];
  }
  Vector draw(const TruncatedGaussianLaw& l, Engine& rng) const {
    for (int attempt = 0; attempt < 100000; ++attempt) {
      Vector x = gaussian(rng, l.sigma);
      if (x.norm() <= l.radius) return x;
    }
    throw InvalidArgument("truncated_gaussian law: rejection sampler acceptance too low");
  }

  double rate_;
  JumpLaw law_;
  int dim_;
};

/// Jump times in (0, horizon], strictly increasing, with their marks.
struct JumpTrain {
  double horizon = 0.0;
  std::vector<double> times;
  std::vector<Vector> marks;

  std::size_t size() const { return times.size(); }
};

/// Monte Carlo (or exact) estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

namespace detail {

inline void make_strictly_increasing(std::vector<double>& times) {
  std::sort(times.begin(), times.end());
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1])
      times[i] = std::nextafter(times[i - 1], std::numeric_limits<double>::infinity());
}

}  // namespace detail

/// `count` jumps at uniform order statistics on (start, start + length], marks
/// i.i.d. from the jump law. Times and marks use independent sub-streams.
inline JumpTrain sample_train_with_count(const CompoundPoissonSpec& spec, double horizon,
                                         std::size_t count, std::uint64_t seed) {
  JumpTrain train;
  train.horizon = horizon;
  Engine time_rng = make_engine(seed, "jump-times");
  Engine mark_rng = make_engine(seed, "jump-marks");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  train.times.reserve(count);
  for (std::size_t i = 0; i < count; ++i) train.times.push_back(horizon * (1.0 - unif(time_rng)));
  detail::make_strictly_increasing(train.times);
  train.marks.reserve(count);
  for (std::size_t i = 0; i < count; ++i) train.marks.push_back(spec.sample_mark(mark_rng));
  return train;
}

/// Compound Poisson jump train on (0, horizon]: count ~ Poisson(rate * horizon),
/// times are sorted uniforms, marks i.i.d. Deterministic given seed; marks come
/// from their own sub-stream so mark i does not depend on the horizon.
inline JumpTrain sample_jump_train(const CompoundPoissonSpec& spec, double horizon,
                                   std::uint64_t seed) {
  if (!(horizon > 0.0)) throw InvalidArgument("sample_jump_train: horizon must be > 0");
  std::size_t count = 0;
  if (spec.rate() > 0.0) {
    Engine count_rng = make_engine(seed, "jump-count");
    std::poisson_distribution<long long> poisson(spec.rate() * horizon);
    count = static_cast<std::size_t>(poisson(count_rng));
  }
  return sample_train_with_count(spec, horizon, count, seed);
}

/// Integral of f against nu = rate * jump_law. Point-mass mixtures are
/// integrated exactly (std_error 0); other laws by Monte Carlo over n_mc marks.
inline Estimate levy_integral(const CompoundPoissonSpec& spec,
                              const std::function<double(const Vector&)>& f, long n_mc,
                              std::uint64_t seed) {
  if (spec.rate() == 0.0) return {0.0, 0.0};
  if (const auto* pm = std::get_if<PointMassMixture>(&spec.law())) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pm->atoms.size(); ++i) {
      const double v = f(pm->atoms[i]);
      if (!std::isfinite(v)) throw NumericalDefect("levy_integral: non-finite integrand");
      sum += pm->weights[i] * v;
    }
    return {spec.rate() * sum, 0.0};
  }
  if (n_mc < 2) throw InvalidArgument("levy_integral: n_mc must be >= 2");
  Engine rng = make_engine(seed, "levy-integral");
  std::vector<double> values(static_cast<std::size_t>(n_mc));
  double sum = 0.0;
  for (auto& v : values) {
    v = f(spec.sample_mark(rng));
    if (!std::isfinite(v)) throw NumericalDefect("levy_integral: non-finite integrand");
    sum += v;
  }
  const double mean = sum / static_cast<double>(n_mc);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n_mc - 1));
  return {spec.rate() * mean, spec.rate() * sd / std::sqrt(static_cast<double>(n_mc))};
}

struct MomentCheck {
  bool finite = true;
  Estimate value;  // integral of ||y||^{2p} against nu
};

/// E||L_1||^{2p} < infinity. Every supported law has moments of all orders,
/// so `finite` is always true; `value` estimates the integral of ||y||^{2p}.
inline MomentCheck moment_2p_finite(const CompoundPoissonSpec& spec, double p, long n_mc,
                                    std::uint64_t seed) {
  if (!(p > 0.0)) throw InvalidArgument("moment_2p_finite: p must be > 0");
  const Estimate est = levy_integral(
      spec, [p](const Vector& y) { return std::pow(y.norm(), 2.0 * p); }, n_mc, seed);
  return {true, est};
}

/// Closed form of the second-moment matrix of nu, when the law admits one.
inline std::optional<Matrix> second_moment_closed_form(const CompoundPoissonSpec& spec) {
  const int d = spec.dim();
  const Matrix id = Matrix::Identity(d, d);
  if (const auto* g = std::get_if<GaussianLaw>(&spec.law()))
    return Matrix(spec.rate() * g->sigma * g->sigma * id);
  if (const auto* b = std::get_if<BallUniformLaw>(&spec.law()))
    return Matrix(spec.rate() * b->radius * b->radius / (d + 2.0) * id);
  if (const auto* pm = std::get_if<PointMassMixture>(&spec.law())) {
    Matrix m = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < pm->atoms.size(); ++i)
      m += pm->weights[i] * pm->atoms[i] * pm->atoms[i].transpose();
    return Matrix(spec.rate() * m);
  }
  return std::nullopt;
}

}  // namespace mucogarch

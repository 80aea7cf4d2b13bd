#pragma once

// Sufficient conditions for stationarity, finite moments, geometric
// ergodicity and first-order stationarity of the MUCOGARCH(1,1) volatility
// process, each evaluated numerically into a ConditionReport.
//
// Every condition has the form  lhs < rhs  with lhs an integral against the
// Levy measure. Monte Carlo estimates decide the strict inequality with a
// three-sigma band:
//   yes          lhs + 3 se < rhs
//   no           lhs - 3 se > rhs
//   inconclusive otherwise.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <variant>

#include "mucogarch/errors.hpp"
#include "mucogarch/levy.hpp"
#include "mucogarch/matcore.hpp"
#include "mucogarch/process.hpp"

namespace mucogarch {

enum class Verdict { yes, no, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    default: return "inconclusive";
  }
}

inline Verdict decide(double lhs, double lhs_stderr, double rhs) {
  if (lhs + 3.0 * lhs_stderr < rhs) return Verdict::yes;
  if (lhs - 3.0 * lhs_stderr > rhs) return Verdict::no;
  return Verdict::inconclusive;
}

struct ConditionReport {
  std::string name;
  double lhs = 0.0;
  double lhs_stderr = 0.0;
  double rhs = 0.0;
  Verdict satisfied = Verdict::inconclusive;
  std::string inputs_digest;
  std::map<std::string, double> extras;
  std::map<std::string, Verdict> sub_verdicts;
};

namespace detail {

inline void append_number(std::ostringstream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf << ',';
}

inline void append_matrix(std::ostringstream& os, const Matrix& m) {
  os << m.rows() << 'x' << m.cols() << ':';
  for (double v : to_row_major(m)) append_number(os, v);
  os << ';';
}

inline std::string describe_law(const CompoundPoissonSpec& spec) {
  std::ostringstream os;
  os << law_name(spec.law()) << ':';
  std::visit(
      [&](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, GaussianLaw>) {
          append_number(os, l.sigma);
        } else if constexpr (std::is_same_v<L, BallUniformLaw>) {
          append_number(os, l.radius);
        } else if constexpr (std::is_same_v<L, TruncatedGaussianLaw>) {
          append_number(os, l.sigma);
          append_number(os, l.radius);
        } else {
          for (std::size_t i = 0; i < l.atoms.size(); ++i) {
            for (Eigen::Index j = 0; j < l.atoms[i].size(); ++j) append_number(os, l.atoms[i](j));
            append_number(os, l.weights[i]);
          }
        }
      },
      spec.law());
  return os.str();
}

}  // namespace detail

/// 64-bit FNV-1a digest (hex) of the parameters, noise, order and MC settings.
inline std::string inputs_digest(const ModelParams& params, const CompoundPoissonSpec& spec,
                                 const std::string& name, double order, long n_mc,
                                 std::uint64_t seed) {
  std::ostringstream os;
  os << name << '|';
  detail::append_matrix(os, params.A());
  detail::append_matrix(os, params.B());
  detail::append_matrix(os, params.C());
  os << '|';
  detail::append_number(os, spec.rate());
  os << detail::describe_law(spec) << '|';
  detail::append_number(os, order);
  os << n_mc << '|' << seed;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(detail::fnv1a(os.str())));
  return buf;
}

namespace detail {

inline void check_dims(const ModelParams& params, const CompoundPoissonSpec& spec) {
  if (params.dim() != spec.dim())
    throw InvalidArgument("noise dimension differs from model dimension");
}

/// ||vec(y y^T)||_2 (= ||y||_2^2).
inline double vec_outer_norm(const Vector& y) { return vec(Matrix(y * y.transpose())).norm(); }

/// ||vec(y y^T)||_{B,S}.
inline double vec_outer_bs_norm(const BSNormContext& ctx, const Vector& y) {
  return bs_norm_vector(ctx, vec(Matrix(y * y.transpose())));
}

inline ConditionReport finish(ConditionReport r, const ModelParams& params,
                              const CompoundPoissonSpec& spec, double order, long n_mc,
                              std::uint64_t seed) {
  r.satisfied = decide(r.lhs, r.lhs_stderr, r.rhs);
  r.inputs_digest = inputs_digest(params, spec, r.name, order, n_mc, seed);
  return r;
}

}  // namespace detail

/// Log-moment stationarity condition
///   int log(1 + alpha_1 ||vec(yy^T)||_{B,S}) nu(dy) < -2 lambda.
inline ConditionReport check_log_stationarity(const ModelParams& params,
                                              const CompoundPoissonSpec& spec,
                                              const BSNormContext& ctx, long n_mc,
                                              std::uint64_t seed) {
  detail::check_dims(params, spec);
  const double alpha1 = ctx.alpha1;
  const Estimate integral = levy_integral(
      spec,
      [&](const Vector& y) { return std::log1p(alpha1 * detail::vec_outer_bs_norm(ctx, y)); },
      n_mc, seed);
  ConditionReport r;
  r.name = "log_stationarity";
  r.lhs = integral.value;
  r.lhs_stderr = integral.std_error;
  r.rhs = -2.0 * ctx.lambda;
  r.extras = {{"lambda", ctx.lambda}, {"alpha1", alpha1}, {"K2B", ctx.K2B},
              {"norm_AA_BS", ctx.norm_AA}, {"cond_S", ctx.cond_S}};
  return detail::finish(std::move(r), params, spec, 0.0, n_mc, seed);
}

/// k-th moment condition
///   int ((1 + alpha_1 ||vec(yy^T)||_{B,S})^k - 1) nu(dy) < -2 lambda k.
inline ConditionReport check_moment_k(const ModelParams& params, const CompoundPoissonSpec& spec,
                                      const BSNormContext& ctx, int k, long n_mc,
                                      std::uint64_t seed) {
  detail::check_dims(params, spec);
  if (k < 1) throw InvalidArgument("check_moment_k: k must be a positive integer");
  const double alpha1 = ctx.alpha1;
  const Estimate integral = levy_integral(
      spec,
      [&](const Vector& y) {
        return std::pow(1.0 + alpha1 * detail::vec_outer_bs_norm(ctx, y), k) - 1.0;
      },
      n_mc, seed);
  ConditionReport r;
  r.name = "moment_k";
  r.lhs = integral.value;
  r.lhs_stderr = integral.std_error;
  r.rhs = -2.0 * ctx.lambda * k;
  r.extras = {{"k", static_cast<double>(k)}, {"lambda", ctx.lambda}, {"alpha1", alpha1}};
  return detail::finish(std::move(r), params, spec, k, n_mc, seed);
}

namespace detail {

inline ConditionReport geom_ergodicity_report(const ModelParams& params,
                                              const CompoundPoissonSpec& spec, double p,
                                              bool convex_case, long n_mc, std::uint64_t seed) {
  check_dims(params, spec);
  const double norm_aa = spectral_norm(kron(params.A(), params.A()));
  const double factor = convex_case ? std::pow(2.0, p - 1.0) : 1.0;
  const Estimate integral = levy_integral(
      spec,
      [&](const Vector& y) {
        return factor * std::pow(1.0 + norm_aa * vec_outer_norm(y), p) - 1.0;
      },
      n_mc, seed);
  const double m_b = numerical_range_max(params.B());
  const MomentCheck moment = moment_2p_finite(spec, p, n_mc, seed);

  ConditionReport r;
  r.name = convex_case ? "geom_ergodicity" : "geom_ergodicity_small_p";
  r.lhs = integral.value + m_b * p;
  r.lhs_stderr = integral.std_error;
  r.rhs = 0.0;
  r.extras = {{"p", p},
              {"m_B", m_b},
              {"integral", integral.value},
              {"norm_AA", norm_aa},
              {"moment_2p", moment.value.value},
              {"moment_2p_stderr", moment.value.std_error},
              // value of lhs with A = 0, kept beside lhs so the 2^{p-1} penalty is visible
              {"lhs_if_A_zero", spec.rate() * (factor - 1.0) + m_b * p}};
  r.sub_verdicts = {{"moment_2p_finite", moment.finite ? Verdict::yes : Verdict::no},
                    {"B_stable", params.stable() ? Verdict::yes : Verdict::no}};
  return finish(std::move(r), params, spec, p, n_mc, seed);
}

}  // namespace detail

/// Geometric ergodicity condition for p >= 1:
///   int (2^{p-1} (1 + ||A(x)A||_2 ||vec(yy^T)||_2)^p - 1) nu(dy) + m_B p < 0,
/// together with the 2p-moment requirement on the noise.
inline ConditionReport check_geom_ergodicity(const ModelParams& params,
                                             const CompoundPoissonSpec& spec, double p,
                                             long n_mc, std::uint64_t seed) {
  if (!(p >= 1.0)) throw InvalidArgument("check_geom_ergodicity: p must be >= 1");
  return detail::geom_ergodicity_report(params, spec, p, true, n_mc, seed);
}

/// Geometric ergodicity condition for p in (0, 1) (no 2^{p-1} factor).
inline ConditionReport check_geom_ergodicity_small_p(const ModelParams& params,
                                                     const CompoundPoissonSpec& spec, double p,
                                                     long n_mc, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0))
    throw InvalidArgument("check_geom_ergodicity_small_p: p must lie in (0, 1)");
  return detail::geom_ergodicity_report(params, spec, p, false, n_mc, seed);
}

/// Dispatches to the p >= 1 or p < 1 variant.
inline ConditionReport check_geom_ergodicity_any(const ModelParams& params,
                                                 const CompoundPoissonSpec& spec, double p,
                                                 long n_mc, std::uint64_t seed) {
  return p >= 1.0 ? check_geom_ergodicity(params, spec, p, n_mc, seed)
                  : check_geom_ergodicity_small_p(params, spec, p, n_mc, seed);
}

/// Asymptotic first-order stationarity:
///   (i)   int x x^T nu(dx) = sigma_L I_d,
///   (ii)  sigma(B) in the open left half-plane,
///   (iii) sigma(B (x) I + I (x) B + sigma_L (A (x) A)) in the open left half-plane.
/// lhs/rhs describe (iii) (lhs = max Re eigenvalue); the verdict is the
/// conjunction of all three.
inline ConditionReport check_first_order(const ModelParams& params,
                                         const CompoundPoissonSpec& spec, long n_mc,
                                         std::uint64_t seed) {
  detail::check_dims(params, spec);
  const int d = params.dim();
  Matrix second(d, d);
  Matrix second_se = Matrix::Zero(d, d);
  if (auto closed = second_moment_closed_form(spec)) {
    second = *closed;
  } else {
    if (n_mc < 2) throw InvalidArgument("check_first_order: n_mc must be >= 2");
    Engine rng = make_engine(seed, "levy-integral");
    Matrix sum = Matrix::Zero(d, d);
    Matrix sum_sq = Matrix::Zero(d, d);
    for (long i = 0; i < n_mc; ++i) {
      const Vector x = spec.sample_mark(rng);
      const Matrix xx = x * x.transpose();
      sum += xx;
      sum_sq += xx.cwiseProduct(xx);
    }
    const double n = static_cast<double>(n_mc);
    const Matrix mean = sum / n;
    const Matrix var = ((sum_sq / n) - mean.cwiseProduct(mean)) * (n / (n - 1.0));
    second = spec.rate() * mean;
    second_se = spec.rate() * (var.cwiseMax(0.0) / n).cwiseSqrt();
  }

  const double sigma_l = second.trace() / d;
  const double scale = std::max(1.0, second.cwiseAbs().maxCoeff());
  bool isotropic = true;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double target = i == j ? sigma_l : 0.0;
      if (std::abs(second(i, j) - target) > 3.0 * second_se(i, j) + 1e-12 * scale)
        isotropic = false;
    }

  const Matrix aa = kron(params.A(), params.A());
  const Matrix b_hat = kron_sum(params.B()) + sigma_l * aa;
  const double abscissa_hat = spectral_abscissa(b_hat);
  const double se_sigma = second_se.diagonal().norm() / d;

  ConditionReport r;
  r.name = "first_order";
  r.lhs = abscissa_hat;
  r.lhs_stderr = spectral_norm(aa) * se_sigma;
  r.rhs = 0.0;
  const Verdict iii = decide(r.lhs, r.lhs_stderr, r.rhs);
  const Verdict ii = params.stable() ? Verdict::yes : Verdict::no;
  const Verdict i = isotropic ? Verdict::yes : Verdict::no;
  r.sub_verdicts = {{"isotropic", i}, {"B_stable", ii}, {"B_hat_stable", iii}};
  r.extras = {{"sigma_L", sigma_l},
              {"sigma_L_stderr", se_sigma},
              {"abscissa_B", params.spectral_abscissa_B()},
              {"abscissa_B_hat", abscissa_hat}};
  r.inputs_digest = inputs_digest(params, spec, r.name, 0.0, n_mc, seed);
  if (i == Verdict::no || ii == Verdict::no || iii == Verdict::no)
    r.satisfied = Verdict::no;
  else if (iii == Verdict::inconclusive)
    r.satisfied = Verdict::inconclusive;
  else
    r.satisfied = Verdict::yes;
  return r;
}

}  // namespace mucogarch

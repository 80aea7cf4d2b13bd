#pragma once

// Dense linear algebra on symmetric and positive semidefinite matrices:
// vec/Kronecker calculus, the matrix exponential, PSD square roots, the real
// numerical range of B (x) I + I (x) B, and the B,S-norm machinery used by the
// log-stationarity and moment conditions.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mucogarch/errors.hpp"
#include "mucogarch/rng.hpp"

namespace mucogarch {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Spectral helpers
// ---------------------------------------------------------------------------

template <class Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic,
                                 Eigen::Dynamic>>
      svd(m);
  return svd.singularValues()(0);
}

/// Eigenvalues of the symmetric part of m, ascending.
inline Vector sym_eigenvalues(const Matrix& m) {
  const Matrix s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double lambda_min_sym(const Matrix& m) { return sym_eigenvalues(m)(0); }

inline double lambda_max_sym(const Matrix& m) {
  const Vector ev = sym_eigenvalues(m);
  return ev(ev.size() - 1);
}

/// max Re(sigma(m)).
inline double spectral_abscissa(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  return es.eigenvalues().real().maxCoeff();
}

/// Membership tolerance for the PSD cone: 1e-10 * max(1, ||m||_2).
inline double psd_tolerance(const Matrix& m) {
  return 1e-10 * std::max(1.0, spectral_norm(m));
}

inline bool is_psd(const Matrix& m) {
  return lambda_min_sym(m) >= -psd_tolerance(m);
}

// ---------------------------------------------------------------------------
// Strong types
// ---------------------------------------------------------------------------

/// Real symmetric d x d matrix. Construction symmetrizes as (m + m^T)/2,
/// which makes entries(i,j) and entries(j,i) bit-identical.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0)
      throw InvalidArgument("SymMatrix: matrix must be square and non-empty");
    if (!m.allFinite()) throw InvalidArgument("SymMatrix: non-finite entry");
    m_ = 0.5 * (m + m.transpose());
  }

  static SymMatrix from_row_major(int dim, std::span<const double> values) {
    if (dim <= 0 || values.size() != static_cast<std::size_t>(dim) * dim)
      throw InvalidArgument("SymMatrix: expected " + std::to_string(dim * dim) +
                            " row-major entries");
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = values[i * dim + j];
    return SymMatrix(m);
  }

  static SymMatrix identity(int dim) { return SymMatrix(Matrix::Identity(dim, dim)); }
  static SymMatrix zero(int dim) { return SymMatrix(Matrix::Zero(dim, dim)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix m_;
};

/// Element of the closed PSD cone (smallest eigenvalue >= -psd_tolerance).
class PsdMatrix {
 public:
  PsdMatrix() = default;

  explicit PsdMatrix(SymMatrix base) : base_(std::move(base)) {
    const double lmin = lambda_min_sym(base_.matrix());
    if (lmin < -psd_tolerance(base_.matrix()))
      throw NotPsdError("matrix is not positive semidefinite (lambda_min = " +
                        std::to_string(lmin) + ")");
  }

  explicit PsdMatrix(const Matrix& m) : PsdMatrix(SymMatrix(m)) {}

  static PsdMatrix identity(int dim) { return PsdMatrix(SymMatrix::identity(dim)); }
  static PsdMatrix zero(int dim) { return PsdMatrix(SymMatrix::zero(dim)); }

  int dim() const { return base_.dim(); }
  const SymMatrix& base() const { return base_; }
  const Matrix& matrix() const { return base_.matrix(); }

 private:
  SymMatrix base_;
};

// ---------------------------------------------------------------------------
// vec / Kronecker
// ---------------------------------------------------------------------------

/// Column-stacking vec of an arbitrary square matrix.
inline Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Vector vec_op(const SymMatrix& m) { return vec(m.matrix()); }

/// Inverse of vec for a d x d matrix.
inline Matrix unvec(const Vector& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim)
    throw InvalidArgument("unvec: vector length is not dim^2");
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

/// Dimension d of a vec-state of length d^2.
inline int vec_dim(const Vector& x) {
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(x.size()))));
  if (static_cast<Eigen::Index>(d) * d != x.size())
    throw InvalidArgument("vec-state length is not a perfect square");
  return d;
}

template <class DA, class DB>
auto kron(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                             a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// B (x) I + I (x) B, the drift matrix of the vectorized volatility SDE.
inline Matrix kron_sum(const Matrix& b) {
  const Matrix id = Matrix::Identity(b.rows(), b.cols());
  return kron(b, id) + kron(id, b);
}

// ---------------------------------------------------------------------------
// Matrix exponential: scaling and squaring with the degree-13 Pade approximant
// ---------------------------------------------------------------------------

/// e^{m t}. Throws OverflowError when ||m t||_2 > 700.
inline Matrix mat_exp(const Matrix& m, double t) {
  if (m.rows() != m.cols()) throw InvalidArgument("mat_exp: matrix must be square");
  if (!std::isfinite(t)) throw InvalidArgument("mat_exp: t must be finite");
  const Eigen::Index n = m.rows();
  const Matrix id = Matrix::Identity(n, n);
  if (t == 0.0) return id;
  const Matrix a0 = m * t;
  if (!a0.allFinite()) throw OverflowError("mat_exp: non-finite argument");
  if (spectral_norm(a0) > 700.0) throw OverflowError("mat_exp: ||m t||_2 > 700");

  static constexpr double kB[14] = {64764752532480000.0,
                                    32382376266240000.0,
                                    7771770303897600.0,
                                    1187353796428800.0,
                                    129060195264000.0,
                                    10559470521600.0,
                                    670442572800.0,
                                    33522128640.0,
                                    1323241920.0,
                                    40840800.0,
                                    960960.0,
                                    16380.0,
                                    182.0,
                                    1.0};
  constexpr double kTheta13 = 5.371920351148152;

  const double norm1 = a0.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > kTheta13) s = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  const Matrix a = a0 / std::ldexp(1.0, s);

  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u =
      a * (a6 * (kB[13] * a6 + kB[11] * a4 + kB[9] * a2) + kB[7] * a6 + kB[5] * a4 +
           kB[3] * a2 + kB[1] * id);
  const Matrix v = a6 * (kB[12] * a6 + kB[10] * a4 + kB[8] * a2) + kB[6] * a6 +
                   kB[4] * a4 + kB[2] * a2 + kB[0] * id;
  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

// ---------------------------------------------------------------------------
// PSD square root
// ---------------------------------------------------------------------------

namespace detail {

/// Square root of a symmetric matrix with negative eigenvalues clamped to 0.
inline Matrix clamped_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Matrix r = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

}  // namespace detail

/// Unique PSD square root. Rejects input with lambda_min < -psd_tolerance.
inline PsdMatrix psd_sqrt(const PsdMatrix& m) {
  return PsdMatrix(detail::clamped_sqrt(m.matrix()));
}

// ---------------------------------------------------------------------------
// Real numerical range of B (x) I + I (x) B
// ---------------------------------------------------------------------------

/// m_B: largest element of the real numerical range of B (x) I + I (x) B,
/// i.e. lambda_max of its symmetric part.
inline double numerical_range_max(const Matrix& b) { return lambda_max_sym(kron_sum(b)); }

/// m_min,B: smallest element of the same numerical range.
inline double numerical_range_min(const Matrix& b) { return lambda_min_sym(kron_sum(b)); }

// ---------------------------------------------------------------------------
// B,S-norms and the constants K_{2,B}, alpha_1
// ---------------------------------------------------------------------------

struct BSNormContext {
  Matrix B;
  CMatrix S;      // columns: unit-length eigenvectors of B
  CMatrix S_inv;
  double lambda = 0.0;      // max Re sigma(B)
  double cond_S = 1.0;      // ||S||_2 ||S^{-1}||_2
  double norm_AA = 0.0;     // ||A (x) A||_{B,S}
  double K2B = 1.0;
  double alpha1 = 0.0;

  int dim() const { return static_cast<int>(B.rows()); }
};

/// ||(S^{-1} (x) S^{-1}) x||_2 for a vec-state x of length d^2.
inline double bs_norm_vector(const BSNormContext& ctx, const Vector& x) {
  const int d = ctx.dim();
  if (x.size() != static_cast<Eigen::Index>(d) * d)
    throw InvalidArgument("bs_norm_vector: length must be d^2");
  const CMatrix sk = kron(ctx.S_inv, ctx.S_inv);
  return (sk * x.cast<std::complex<double>>()).norm();
}

/// ||(S^{-1} (x) S^{-1}) X (S (x) S)||_2 for X of size d^2 x d^2.
inline double bs_norm_matrix(const BSNormContext& ctx, const Matrix& x) {
  const int d = ctx.dim();
  if (x.rows() != d * d || x.cols() != d * d)
    throw InvalidArgument("bs_norm_matrix: matrix must be d^2 x d^2");
  const CMatrix left = kron(ctx.S_inv, ctx.S_inv);
  const CMatrix right = kron(ctx.S, ctx.S);
  return spectral_norm(CMatrix(left * x.cast<std::complex<double>>() * right));
}

/// Feasible set for the K_{2,B} maximization.
enum class K2BDomain { psd, symmetric };

struct K2BOptions {
  K2BDomain domain = K2BDomain::psd;
  int random_starts = 50;
  int max_iterations = 300;
  std::uint64_t seed = 0x4B32425ULL;
};

namespace detail {

/// ||X||_2 / ||vec(X)||_{B,S}, using (S^-1 (x) S^-1) vec X = vec(S^-1 X S^-T).
inline double k2b_ratio(const CMatrix& s_inv, const Matrix& x) {
  const CMatrix w = s_inv * x.cast<std::complex<double>>() * s_inv.transpose();
  const double denom = w.norm();
  if (denom == 0.0) return 0.0;
  return spectral_norm(x) / denom;
}

struct K2BTop {
  double value;   // spectral norm (PSD) or max |eigenvalue| (symmetric)
  Matrix grad;    // a supergradient of that value
};

inline K2BTop k2b_top(const Matrix& x, K2BDomain domain) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(x);
  const Eigen::Index n = x.rows();
  Eigen::Index idx = n - 1;
  double sign = 1.0;
  if (domain == K2BDomain::symmetric && -es.eigenvalues()(0) > es.eigenvalues()(n - 1)) {
    idx = 0;
    sign = -1.0;
  }
  const Vector v = es.eigenvectors().col(idx);
  return {sign * es.eigenvalues()(idx), sign * v * v.transpose()};
}

inline Matrix k2b_project(const Matrix& x, K2BDomain domain) {
  Matrix s = 0.5 * (x + x.transpose());
  if (domain == K2BDomain::psd) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    s = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
        es.eigenvectors().transpose();
    s = 0.5 * (s + s.transpose());
  }
  const double nrm = spectral_norm(s);
  if (nrm == 0.0) return s;
  return s / nrm;
}

/// Projected gradient ascent on log ||X||_2 - 0.5 log ||S^-1 X S^-T||_F^2.
inline double k2b_ascend(const CMatrix& s_inv, Matrix x, const K2BOptions& opts) {
  x = k2b_project(x, opts.domain);
  double best = k2b_ratio(s_inv, x);
  if (best == 0.0) return 0.0;
  double step = 0.5;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const K2BTop top = k2b_top(x, opts.domain);
    const CMatrix w = s_inv * x.cast<std::complex<double>>() * s_inv.transpose();
    const double g = w.squaredNorm();
    const CMatrix gm = s_inv.transpose() * w.adjoint() * s_inv;
    Matrix dg = 2.0 * gm.transpose().real();
    dg = 0.5 * (dg + dg.transpose());
    const Matrix grad = top.grad / top.value - dg / (2.0 * g);

    bool improved = false;
    double trial_step = step * 2.0;
    for (int ls = 0; ls < 40; ++ls) {
      const Matrix cand = k2b_project(x + trial_step * grad, opts.domain);
      const double r = k2b_ratio(s_inv, cand);
      if (r > best * (1.0 + 1e-15)) {
        x = cand;
        best = r;
        step = trial_step;
        improved = true;
        break;
      }
      trial_step *= 0.5;
    }
    if (!improved) break;
  }
  return best;
}

}  // namespace detail

/// K_{2,B} = max ||X||_2 / ||vec(X)||_{B,S} over unit-spectral-norm X in the
/// chosen domain. Multi-start projected gradient ascent from random starts and
/// all e_i e_i^T; deterministic given opts.seed.
inline double k2b_constant(const BSNormContext& ctx, const K2BOptions& opts = {}) {
  const int d = ctx.dim();
  if (d == 1) return 1.0;
  double best = 0.0;
  for (int i = 0; i < d; ++i) {
    Matrix e = Matrix::Zero(d, d);
    e(i, i) = 1.0;
    best = std::max(best, detail::k2b_ascend(ctx.S_inv, e, opts));
  }
  Engine rng = make_engine(opts.seed, "k2b");
  std::normal_distribution<double> normal;
  for (int s = 0; s < opts.random_starts; ++s) {
    Matrix g(d, d);
    for (Eigen::Index k = 0; k < g.size(); ++k) g(k) = normal(rng);
    Matrix start = opts.domain == K2BDomain::psd ? Matrix(g * g.transpose())
                                                  : Matrix(g + g.transpose());
    best = std::max(best, detail::k2b_ascend(ctx.S_inv, start, opts));
  }
  return best;
}

/// Diagonalizes B, then fills lambda, K_{2,B} and
/// alpha_1 = ||S||^2 ||S^-1||^2 K_{2,B} ||A (x) A||_{B,S}.
/// Throws NotDiagonalizableError when cond(S) >= 1e8.
inline BSNormContext make_bs_context(const Matrix& b, const Matrix& a,
                                     const K2BOptions& opts = {}) {
  if (b.rows() != b.cols() || a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidArgument("make_bs_context: A and B must be square of equal size");
  const Eigen::Index d = b.rows();
  BSNormContext ctx;
  ctx.B = b;
  if (b == b.transpose()) {
    // Orthogonal eigenvectors for symmetric B.
    Eigen::SelfAdjointEigenSolver<Matrix> es(b);
    ctx.S = es.eigenvectors().cast<std::complex<double>>();
  } else {
    Eigen::EigenSolver<Matrix> es(b);
    if (es.info() != Eigen::Success)
      throw NotDiagonalizableError("make_bs_context: eigen decomposition failed");
    ctx.S = es.eigenvectors();
    for (Eigen::Index j = 0; j < d; ++j) ctx.S.col(j).normalize();
  }
  Eigen::JacobiSVD<CMatrix> svd(ctx.S);
  const auto& sv = svd.singularValues();
  const double smin = sv(d - 1);
  ctx.cond_S = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  if (!(ctx.cond_S < 1e8))
    throw NotDiagonalizableError(
        "B is not numerically diagonalizable (eigenvector condition number " +
        std::to_string(ctx.cond_S) + " >= 1e8)");
  ctx.S_inv = ctx.S.inverse();

  const CMatrix diag = ctx.S_inv * b.cast<std::complex<double>>() * ctx.S;
  CMatrix off = diag;
  off.diagonal().setZero();
  if (off.norm() > 1e-10 * std::max(1.0, diag.norm()))
    throw NotDiagonalizableError("S^-1 B S is not diagonal within 1e-10");

  ctx.lambda = diag.diagonal().real().maxCoeff();
  ctx.norm_AA = bs_norm_matrix(ctx, kron(a, a));
  ctx.K2B = k2b_constant(ctx, opts);
  const double s2 = sv(0);
  const double sinv2 = 1.0 / smin;
  ctx.alpha1 = s2 * s2 * sinv2 * sinv2 * ctx.K2B * ctx.norm_AA;
  return ctx;
}

// ---------------------------------------------------------------------------
// Conversions
// ---------------------------------------------------------------------------

inline Matrix from_row_major(int dim, std::span<const double> values) {
  if (dim <= 0 || values.size() != static_cast<std::size_t>(dim) * dim)
    throw InvalidArgument("expected " + std::to_string(dim * dim) + " row-major entries");
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = values[i * dim + j];
  return m;
}

inline std::vector<double> to_row_major(const Matrix& m) {
  std::vector<double> out;
  out.reserve(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

/// d(d+1)/2 upper-triangle entries, row-major.
inline std::vector<double> upper_triangle(const Matrix& m) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

}  // namespace mucogarch

#pragma once

// Random instance generators shared by the test binaries.

#include <cmath>
#include <cstdint>
#include <random>

#include "mucogarch/mucogarch.hpp"

namespace testsupport {

using mucogarch::Matrix;
using mucogarch::Vector;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return normal_(rng_); }

  Matrix matrix(int d, double scale = 1.0) {
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = scale * normal();
    return m;
  }

  Vector vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Vector unit(int n) {
    Vector v = vector(n);
    while (v.norm() == 0.0) v = vector(n);
    return v / v.norm();
  }

  /// PSD with random rank in [1, d] and Frobenius norm `norm`.
  Matrix psd(int d, double norm = 1.0) {
    Matrix w = Matrix::Zero(d, d);
    const int r = integer(1, d);
    for (int k = 0; k < r; ++k) {
      const Vector g = vector(d);
      w += g * g.transpose();
    }
    return norm * w / w.norm();
  }

  /// Positive definite with eigenvalues in [lo, hi].
  Matrix pd(int d, double lo = 0.2, double hi = 2.0) {
    const Eigen::HouseholderQR<Matrix> qr(matrix(d));
    const Matrix q = qr.householderQ();
    Vector ev(d);
    for (int i = 0; i < d; ++i) ev(i) = uniform(lo, hi);
    Matrix m = q * ev.asDiagonal() * q.transpose();
    return 0.5 * (m + m.transpose());
  }

  /// B with spectral abscissa in [-2, -0.2].
  Matrix stable(int d) {
    Matrix b = matrix(d, 0.5);
    const double shift = mucogarch::spectral_abscissa(b) + uniform(0.2, 2.0);
    b -= shift * Matrix::Identity(d, d);
    return b;
  }

  /// Symmetric B with eigenvalues in [lo, hi].
  Matrix symmetric(int d, double lo, double hi) {
    const Eigen::HouseholderQR<Matrix> qr(matrix(d));
    const Matrix q = qr.householderQ();
    Vector ev(d);
    for (int i = 0; i < d; ++i) ev(i) = uniform(lo, hi);
    Matrix m = q * ev.asDiagonal() * q.transpose();
    return 0.5 * (m + m.transpose());
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

inline mucogarch::PointMassMixture point_mass_e1(int d) {
  return {{Vector::Unit(d, 0)}, {1.0}};
}

/// The A = I, B = -I, C = I family with jumps that are all equal to e_1.
inline mucogarch::ModelParams identity_family(int d) {
  const Matrix id = Matrix::Identity(d, d);
  return mucogarch::ModelParams(id, -id, mucogarch::PsdMatrix::identity(d));
}

}  // namespace testsupport

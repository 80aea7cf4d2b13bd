// Evaluates the ergodicity and moment conditions for scalar-like point-mass
// noise at several jump rates.

#include <cstdio>

#include "mucogarch/mucogarch.hpp"

using namespace mucogarch;

int main() {
  const int d = 2;
  const Matrix id = Matrix::Identity(d, d);
  const ModelParams params(id, -id, PsdMatrix::identity(d));
  const BSNormContext ctx = make_bs_context(params.B(), params.A());
  const Vector e1 = Vector::Unit(d, 0);

  std::printf("%6s  %-12s %-12s %-12s %-12s\n", "rate", "log-stat", "moment k=1", "geom p=1", "geom p=0.5");
  for (double rate : {1.0, 2.0, 2.5, 2.8, 3.0}) {
    const CompoundPoissonSpec noise(rate, PointMassMixture{{e1}, {1.0}}, d);
    std::printf("%6.2f  %-12s %-12s %-12s %-12s\n", rate,
                to_string(check_log_stationarity(params, noise, ctx, 0, 0).satisfied),
                to_string(check_moment_k(params, noise, ctx, 1, 0, 0).satisfied),
                to_string(check_geom_ergodicity(params, noise, 1.0, 0, 0).satisfied),
                to_string(check_geom_ergodicity_small_p(params, noise, 0.5, 0, 0).satisfied));
  }
}

// Simulates one bivariate path and prints the volatility at a few times.

#include <iostream>
#include <vector>

#include "mucogarch/mucogarch.hpp"

using namespace mucogarch;

int main() {
  Matrix a(2, 2), b(2, 2), c(2, 2);
  a << 0.4, 0.0, 0.1, 0.3;
  b << -1.0, 0.3, 0.0, -1.2;
  c << 1.0, 0.2, 0.2, 0.5;
  const ModelParams params(a, b, PsdMatrix(c));
  const CompoundPoissonSpec noise(1.0, GaussianLaw{1.0}, 2);

  const std::vector<double> grid{0.0, 1.0, 2.0, 5.0, 10.0};
  const PathRecord rec = simulate_path(params, noise, PsdMatrix::zero(2), 10.0, grid, 42);

  std::cout << rec.train.size() << " jumps on (0, 10]\n";
  for (const PathEvent* e : rec.grid_events())
    std::cout << "t = " << e->time << "\n" << (params.C() + e->Y) << "\n";
  std::cout << "integral-formula discrepancy: " << reconstruct_path(rec) << "\n";
}

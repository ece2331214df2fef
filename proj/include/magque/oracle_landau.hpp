#pragma once

#include <vector>

#include "magque/operator_grid.hpp"

namespace magque {

struct LandauLevel {
  int j = 1;
  double lambda = 0.0;  // (2j - 1) B
  int multiplicity = 1;
};

struct LandauSpec {
  double b = 0.0;
  int phi = 0;
  Vec2 alpha{0.0, 0.0};
  std::vector<LandauLevel> levels;
};

LandauSpec landau_spectrum(double b0, const Vec2& alpha, int j_max);

/// psi_0..psi_n at t (L2-normalised Hermite functions), via the normalised three-term recurrence.
std::vector<double> hermite_functions(int n, double t);

/// The p-th member (0 <= p < phi) of an orthonormal basis of level j, sampled on an n x n grid.
GridWavefunction landau_eigenfunction(double b0, const Vec2& alpha, int j, int p, int n);

}  // namespace magque

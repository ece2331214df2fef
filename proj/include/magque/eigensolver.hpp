#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "magque/operator_grid.hpp"

namespace magque {

struct EigenTarget {
  enum class Kind { Lowest, Window };
  Kind kind = Kind::Lowest;
  int k = 0;
  double sigma = 0.0;
  std::string describe() const;
};

struct SolverOptions {
  std::uint64_t seed = 1;
  int block_size = 0;  // 0: max(flux + 1, 2)
  int max_basis = 0;   // 0: chosen from k and block size
  long max_matvecs = 2'000'000;
  int filter_degree = 0;  // 0 automatic, > 0 fixed, < 0 no polynomial filter
};

struct EigenResult {
  std::vector<double> eigenvalues;
  std::vector<GridWavefunction> eigenvectors;  // unit norm under (1/N^2) sum |u|^2
  std::vector<double> residuals;
  std::vector<int> clusters;
  EigenTarget target;
  long matvecs = 0;
  int restarts = 0;
};

EigenResult lowest_eigenpairs(const SparseHermitianOperator& h, int k, double tol = 1e-9,
                              const SolverOptions& opts = {});

/// k eigenpairs nearest sigma via the folded operator (H - sigma)^2.
EigenResult window_eigenpairs(const SparseHermitianOperator& h, double sigma, int k,
                              double tol = 1e-9, const SolverOptions& opts = {});

std::vector<double> residual_report(const SparseHermitianOperator& h, const EigenResult& result);

/// Cluster ids for sorted values; neighbours with relative gap below rel_gap share a cluster.
std::vector<int> cluster_eigenvalues(const std::vector<double>& sorted, double rel_gap = 1e-6);

}  // namespace magque

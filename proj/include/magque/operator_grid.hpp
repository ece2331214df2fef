#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "magque/field_gauge.hpp"

namespace magque {

/// Samples u(o + j/N) of a magnetic quasi-periodic function on the shifted unit square o + [0,1)^2.
/// Reads outside the stored square follow the wrap rule
///   u(y + m) = e^{i pi phi (m1 y2 - m2 y1)} (-1)^{phi m1 m2} u(y).
class GridWavefunction {
 public:
  GridWavefunction() = default;
  GridWavefunction(int n, int flux_phi, IVec2 origin = {0, 0});

  int n() const { return n_; }
  int flux() const { return phi_; }
  const IVec2& origin() const { return origin_; }
  std::size_t size() const { return values_.size(); }

  static std::size_t index(int n, int j1, int j2) { return std::size_t(j1) * n + j2; }
  cplx& operator()(int j1, int j2) { return values_[index(n_, j1, j2)]; }
  cplx operator()(int j1, int j2) const { return values_[index(n_, j1, j2)]; }
  /// Value at node j for any integer j, applying the wrap rule.
  cplx at(int j1, int j2) const;
  Vec2 position(int j1, int j2) const;

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx* data() { return values_.data(); }
  const cplx* data() const { return values_.data(); }

  double norm() const;
  /// <u, v> = (1/N^2) sum u conj(v)
  cplx inner(const GridWavefunction& v) const;
  void normalize();

  GridWavefunction& operator+=(const GridWavefunction& v);
  GridWavefunction& operator-=(const GridWavefunction& v);
  GridWavefunction& operator*=(cplx a);

  void check_compatible(const GridWavefunction& v) const;

 private:
  int n_ = 0;
  int phi_ = 0;
  IVec2 origin_{0, 0};
  std::vector<cplx> values_;
};

GridWavefunction operator+(GridWavefunction a, const GridWavefunction& b);
GridWavefunction operator-(GridWavefunction a, const GridWavefunction& b);
GridWavefunction operator*(cplx s, GridWavefunction a);

GridWavefunction random_wavefunction(int n, int flux_phi, std::uint64_t seed, IVec2 origin = {0, 0});

struct AssemblyOptions {
  IVec2 origin{0, 0};
  /// Test hook: flux used in the boundary-crossing phases instead of the true one.
  std::optional<double> wrap_flux_override;
};

class SparseHermitianOperator {
 public:
  int n() const { return n_; }
  int dim() const { return n_ * n_; }
  int flux() const { return phi_; }
  const IVec2& origin() const { return opts_.origin; }
  const GaugePotential& gauge() const { return gauge_; }
  const ScalarPotential& potential() const { return potential_; }
  const AssemblyOptions& options() const { return opts_; }

  /// out = H in over raw storage, one column of length dim.
  void apply(const cplx* in, cplx* out) const;
  GridWavefunction apply(const GridWavefunction& u) const;

  double diagonal(std::size_t i) const { return diag_[i]; }
  /// Coefficient of u(x + e_d/N) in (Hu)(x) at node i, wrap phase included.
  cplx hop(int d, std::size_t i) const { return fwd_[d][i]; }
  double gershgorin_upper() const;
  double gershgorin_lower() const;
  Eigen::MatrixXcd to_dense() const;

  /// The same operator represented on the square shifted by m.
  SparseHermitianOperator translated(const IVec2& m) const;

 private:
  friend SparseHermitianOperator assemble(const GaugePotential&, const ScalarPotential&, int,
                                          AssemblyOptions);
  int n_ = 0;
  int phi_ = 0;
  GaugePotential gauge_;
  ScalarPotential potential_;
  AssemblyOptions opts_;
  std::vector<double> diag_;
  std::array<std::vector<cplx>, 2> fwd_;  // coefficient of the +e_d neighbour
  std::array<std::vector<cplx>, 2> bwd_;  // coefficient of the -e_d neighbour
};

SparseHermitianOperator assemble(const GaugePotential& gauge, const ScalarPotential& potential, int n,
                                 AssemblyOptions opts = {});
GridWavefunction apply(const SparseHermitianOperator& h, const GridWavefunction& u);

GridWavefunction magnetic_translate(const GridWavefunction& u, const IVec2& m);

/// max over seeded random u of ||H_m T_m u - T_m H u|| / ||u||, H_m being H on the shifted square.
double commutation_residual(const SparseHermitianOperator& h, const IVec2& m,
                            std::uint64_t seed = 0x5eed, int samples = 10);

}  // namespace magque

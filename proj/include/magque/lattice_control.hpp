#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "magque/field_gauge.hpp"

namespace magque {

struct Sublattice {
  IVec2 e{1, 0};

  double length() const { return knorm(e); }
  IVec2 perp() const { return {-e[1], e[0]}; }
  bool operator==(const Sublattice&) const = default;
};

/// Canonical primitive generator of Z*k (first nonzero coordinate positive).
Sublattice make_sublattice(const IVec2& k);

/// Lattice whose orthogonal complement contains the rational direction (p, q).
Sublattice sublattice_for_direction(const IVec2& direction);

/// f(s) = sum_j c_j e^{2 pi i j s} with s = e.x, the projection of B onto the modes in a lattice.
class DirectionalAverage {
 public:
  DirectionalAverage(Sublattice lat, std::map<int, cplx> coeffs);

  const Sublattice& lattice() const { return lat_; }
  const std::map<int, cplx>& coeffs() const { return coeffs_; }

  double operator()(double s) const;
  double at(const Vec2& x) const;
  double derivative(double s, int order = 1) const;
  /// Primitive F with F' = f, continuous on R (the c_0 term grows linearly).
  double primitive(double s) const;
  double lipschitz() const;  // sup |f'| bound in s
  MagneticField as_field() const;

 private:
  Sublattice lat_;
  std::map<int, cplx> coeffs_;
};

std::vector<Sublattice> relevant_sublattices(const MagneticField& field);
DirectionalAverage directional_average(const MagneticField& field, const Sublattice& lat);

struct Direction {
  Vec2 theta{0.0, 1.0};
  std::optional<Sublattice> rational;  // empty for irrational slopes
};

/// x -> B_inf(x, theta).
std::function<double(const Vec2&)> b_infinity(const MagneticField& field, const Direction& dir);

struct Witness {
  Sublattice lattice;
  double min_value = 0.0;
  double argmin_s = 0.0;
  Vec2 argmin{0.0, 0.0};
  double lower_bound = 0.0;
  int samples = 0;
};

struct ControlCertificate {
  bool pass = false;
  std::vector<Witness> witnesses;
  int lattices_checked = 0;
  bool exact = true;
  double mean_flux = 0.0;
};

/// Samples start at sample_density and double until the sign of the minimum is decided.
ControlCertificate certify_control(const MagneticField& field, int sample_density = 256);

std::vector<Vec2> critical_geodesics(const MagneticField& field, const Sublattice& lat,
                                     double tol = 1e-9);

}  // namespace magque

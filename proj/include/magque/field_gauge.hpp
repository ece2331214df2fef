#pragma once

#include <map>
#include <span>
#include <vector>

#include "magque/core.hpp"

namespace magque {

struct FourierMode {
  IVec2 k;
  cplx c;
  bool operator==(const FourierMode&) const = default;
};

/// Real trigonometric polynomial on T^2 stored as its nonzero Fourier coefficients.
/// Missing conjugate partners are filled in on construction.
class RealFourierSeries {
 public:
  RealFourierSeries() = default;
  explicit RealFourierSeries(std::span<const FourierMode> modes);

  double operator()(const Vec2& x) const;
  cplx coefficient(const IVec2& k) const;
  const std::map<IVec2, cplx>& modes() const { return modes_; }
  std::vector<FourierMode> list() const;
  int bandlimit() const;  // max |k|_inf
  double abs_sum(bool skip_zero = false) const;

 private:
  std::map<IVec2, cplx> modes_;
};

class MagneticField {
 public:
  MagneticField() = default;
  explicit MagneticField(RealFourierSeries series);

  double mean() const { return mean_; }  // B0 = 2 pi phi
  int flux() const { return phi_; }
  double operator()(const Vec2& x) const { return series_(x); }
  const RealFourierSeries& series() const { return series_; }
  int bandlimit() const { return series_.bandlimit(); }
  double sup_bound() const { return series_.abs_sum(); }

 private:
  RealFourierSeries series_;
  double mean_ = 0.0;
  int phi_ = 0;
};

using ScalarPotential = RealFourierSeries;

/// a = alpha + A0 + Aper with A0 = (B0/2)(-x2, x1) and Aper a real trigonometric field.
class GaugePotential {
 public:
  GaugePotential() = default;
  GaugePotential(double b0, std::map<IVec2, std::array<cplx, 2>> aper, Vec2 alpha);

  double b0() const { return b0_; }
  int flux() const;
  const Vec2& alpha() const { return alpha_; }
  const std::map<IVec2, std::array<cplx, 2>>& periodic_modes() const { return aper_; }
  int bandlimit() const;

  Vec2 periodic(const Vec2& x) const;
  Vec2 operator()(const Vec2& x) const;  // alpha + A0 + Aper
  double curl(const Vec2& x) const;      // analytic dA2/dx1 - dA1/dx2

  /// Exact integral of a along the segment x -> x + len*e_d.
  double link_integral(const Vec2& x, int d, double len) const;

 private:
  double b0_ = 0.0;
  std::map<IVec2, std::array<cplx, 2>> aper_;
  Vec2 alpha_{0.0, 0.0};
};

MagneticField build_field(std::span<const FourierMode> modes);
double eval_field(const MagneticField& field, const Vec2& x);

/// Coulomb gauge with a Floquet parameter alpha.
GaugePotential build_gauge(const MagneticField& field, const Vec2& alpha);

/// a -> a + grad(phi) for a real periodic phi.
GaugePotential gauge_shift(const GaugePotential& gauge, const RealFourierSeries& phi);

/// Max over an n x n grid of |curl(a) - B|.
double verify_gauge(const GaugePotential& gauge, const MagneticField& field, int n = 32);

}  // namespace magque

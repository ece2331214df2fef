#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "magque/operator_grid.hpp"

namespace magque {

using Profile = std::function<cplx(const Vec2&)>;

/// a(x, xi) = sum_k a_k(xi) e^{2 pi i k.x}. Either every a_k is a constant (a symbol of x alone)
/// or every a_k is a profile that vanishes for |xi| > xi_max.
class BandLimitedSymbol {
 public:
  static BandLimitedSymbol position(std::vector<FourierMode> modes, std::string name = {});
  static BandLimitedSymbol phase_space(std::map<IVec2, Profile> modes, double xi_max,
                                       std::string name = {});

  bool xi_independent() const { return constants_ != nullptr; }
  double xi_max() const { return xi_max_; }
  int k_sym() const;
  std::vector<IVec2> wavevectors() const;
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  cplx mode(const IVec2& k, const Vec2& xi) const;
  cplx constant(const IVec2& k) const;  // xi-independent symbols only
  cplx operator()(const Vec2& x, const Vec2& xi) const;

  /// Pointwise product ab.
  BandLimitedSymbol product(const BandLimitedSymbol& b) const;
  /// Checks a_{-k}(xi) = conj(a_k(xi)) on a sample set.
  bool is_real(double tol = 1e-12) const;

 private:
  std::shared_ptr<const std::map<IVec2, cplx>> constants_;
  std::shared_ptr<const std::map<IVec2, Profile>> profiles_;
  double xi_max_ = std::numeric_limits<double>::infinity();
  std::string name_;
};

namespace profiles {

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);
/// 1 on [-1/4, 1/4], 0 outside [-1/2, 1/2].
double chi(double t);
/// chi((|xi - h alpha| - 1) / delta)
Profile shell_cutoff(double delta, double h, const Vec2& alpha);
/// 1 on r_in <= |xi| <= r_out, smooth ramps of the given width on both sides.
Profile radial_plateau(double r_in, double r_out, double width);
/// 1 on |xi| <= r, ramping to 0 on [r, r + width].
Profile disk(double r, double width);
/// exp(-(|xi| - r0)^2 / (2 s^2)) times a smooth cutoff at xi_max.
Profile gaussian_shell(double r0, double s, double xi_max);
/// exp(-|xi - c|^2 / (2 s^2)) times a smooth cutoff at xi_max.
Profile gaussian(const Vec2& c, double s, double xi_max);
Profile scaled(Profile p, cplx factor);

}  // namespace profiles

struct AmbiguityTable {
  double h = 0.0;
  int n = 0;
  int k_sym = 0;
  int j = 0;
  std::vector<cplx> values;

  double zeta_step() const { return 1.0 / (n * h); }
  int side_k() const { return 2 * k_sym + 1; }
  int side_s() const { return 2 * j + 1; }
  std::size_t index(const IVec2& k, const IVec2& s) const;
  cplx at(const IVec2& k, const IVec2& s) const { return values[index(k, s)]; }
  cplx& at(const IVec2& k, const IVec2& s) { return values[index(k, s)]; }
};

/// W(eta, zeta) u with eta = 2 pi k.
GridWavefunction weyl_apply(const GridWavefunction& u, const IVec2& k, const Vec2& zeta, double h);
/// W(eta, zeta) u with zeta = s / (N h), no commensurability check needed.
GridWavefunction weyl_apply_shift(const GridWavefunction& u, const IVec2& k, const IVec2& s);

/// A(2 pi k, s/(N h)) = <W u, u> for |k|_inf <= k_sym and |s|_inf <= j.
AmbiguityTable ambiguity_table(const GridWavefunction& u, double h, int k_sym, int j,
                               int threads = 1);

/// F_k(s Delta) = int a_k(xi) e^{-i s Delta . xi} dxi on |s|_inf <= j; row-major over (s1, s2).
Eigen::MatrixXcd symbol_fourier(const BandLimitedSymbol& sym, const IVec2& k, double delta, int j);

/// Delta^2 sum of |F_k| over the ring j < |s|_inf <= 2j, maximised over k.
double zeta_tail(const BandLimitedSymbol& sym, double delta, int j);

/// Smallest j (within max_j) whose tail is below tol.
int choose_zeta_cutoff(const BandLimitedSymbol& sym, double delta, double tol, int max_j = 1024);

cplx wigner_pair(const BandLimitedSymbol& sym, const AmbiguityTable& tab);

/// Op(a) v by the Weyl sum on the commensurable zeta grid.
GridWavefunction weyl_quantize_apply(const BandLimitedSymbol& sym, const GridWavefunction& v, double h,
                                     int j);

/// Circle average along the constant-field cyclotron flow; m = 0 picks the node count per point.
BandLimitedSymbol averaged_symbol(const BandLimitedSymbol& sym, double h, double b0, const Vec2& alpha,
                                  int m = 0);

/// max over v of ||(Op(a) Op(b) - Op(ab)) v||.
double composition_residual(const BandLimitedSymbol& a, const BandLimitedSymbol& b, double h,
                            const std::vector<GridWavefunction>& test_vectors, int j);

}  // namespace magque

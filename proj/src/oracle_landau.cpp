#include "magque/oracle_landau.hpp"

#include <sstream>

namespace magque {

namespace {

int flux_of(double b0) {
  const double r = b0 / kTwoPi;
  const double rr = std::round(r);
  if (std::abs(r - rr) > 1e-9 || rr < 1.0) {
    std::ostringstream os;
    os << "B0 = " << b0 << " is not 2*pi*phi with phi >= 1";
    throw BadFlux(os.str());
  }
  return int(rr);
}

}  // namespace

LandauSpec landau_spectrum(double b0, const Vec2& alpha, int j_max) {
  LandauSpec s;
  s.phi = flux_of(b0);
  s.b = b0;
  s.alpha = alpha;
  for (int j = 1; j <= j_max; ++j) s.levels.push_back({j, (2.0 * j - 1.0) * b0, s.phi});
  return s;
}

std::vector<double> hermite_functions(int n, double t) {
  std::vector<double> psi(n + 1, 0.0);
  psi[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * t * t);
  if (n >= 1) psi[1] = std::sqrt(2.0) * t * psi[0];
  for (int k = 1; k < n; ++k)
    psi[k + 1] = std::sqrt(2.0 / (k + 1)) * t * psi[k] - std::sqrt(double(k) / (k + 1)) * psi[k - 1];
  return psi;
}

GridWavefunction landau_eigenfunction(double b0, const Vec2& alpha, int j, int p, int n) {
  const int phi = flux_of(b0);
  if (j < 1) throw ValidationError("level index j must be >= 1");
  if (p < 0 || p >= phi) throw ValidationError("basis index p must lie in [0, phi)");
  const double b = b0;
  const double sb = std::sqrt(b);
  const double center = (kTwoPi * p - alpha[1]) / b;
  // Gaussian tail e^{-B (y - y_turn)^2 / 2} < 1e-15 past the reach below
  const double reach = std::sqrt((2.0 * j - 1.0) / b) + std::sqrt(70.0 / b) + 1.0;
  const int n_lo = int(std::floor(-center - reach)) - 1;
  const int n_hi = int(std::ceil(1.0 - center + reach)) + 1;

  GridWavefunction u(n, phi);
  std::vector<double> prof(n_hi - n_lo + 1);
  for (int j1 = 0; j1 < n; ++j1) {
    const double x1 = double(j1) / n;
    for (int m = n_lo; m <= n_hi; ++m)
      prof[m - n_lo] = std::pow(b, 0.25) * hermite_functions(j - 1, sb * (x1 - m - center))[j - 1];
    for (int j2 = 0; j2 < n; ++j2) {
      const double x2 = double(j2) / n;
      cplx v = 0.0;
      for (int m = n_lo; m <= n_hi; ++m) {
        const double w = prof[m - n_lo];
        if (w == 0.0) continue;
        const double t = kTwoPi * (double(m) * phi + p) * x2 - m * alpha[0];
        v += w * cplx(std::cos(t), std::sin(t));
      }
      const double g = -(0.5 * b * x2 - alpha[0]) * x1;
      u(j1, j2) = cplx(std::cos(g), std::sin(g)) * v;
    }
  }
  u.normalize();
  return u;
}

}  // namespace magque

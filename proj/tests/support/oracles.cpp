#include "oracles.hpp"

#include <cmath>
#include <random>

namespace oracle {

namespace {

// 10-point Gauss-Legendre on [-1, 1]
constexpr double kNodes[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244, 0.8650633666889845,
                              0.9739065285171717};
constexpr double kWeights[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                                0.0666713443086881};

double link_phase(const magque::GaugePotential& g, const Vec2& x, int d, double len) {
  double acc = 0.0;
  for (int i = 0; i < 5; ++i)
    for (double sgn : {-1.0, 1.0}) {
      Vec2 p = x;
      p[d] += 0.5 * len * (1.0 + sgn * kNodes[i]);
      acc += kWeights[i] * g(p)[d];
    }
  return 0.5 * len * acc;
}

}  // namespace

Eigen::MatrixXcd dense_operator(const magque::GaugePotential& gauge, const magque::ScalarPotential& v, int n) {
  const int dim = n * n;
  const double phi = gauge.flux();
  const double nn = double(n) * n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const double pi = std::acos(-1.0);
  for (int j1 = 0; j1 < n; ++j1)
    for (int j2 = 0; j2 < n; ++j2) {
      const int row = j1 * n + j2;
      const Vec2 x{double(j1) / n, double(j2) / n};
      h(row, row) += 4.0 * nn + v(x);
      for (int d = 0; d < 2; ++d) {
        // forward neighbour, coefficient -N^2 e^{-i theta}
        const double theta = link_phase(gauge, x, d, 1.0 / n);
        int t1 = j1 + (d == 0), t2 = j2 + (d == 1);
        cplx wrap = 1.0;
        if (t1 == n || t2 == n) {
          // u(y + m) = e^{i pi phi (m1 y2 - m2 y1)} (-1)^{phi m1 m2} u(y)
          const int m1 = (t1 == n), m2 = (t2 == n);
          t1 %= n, t2 %= n;
          const double y1 = double(t1) / n, y2 = double(t2) / n;
          wrap = std::polar(1.0, pi * phi * (m1 * y2 - m2 * y1));
        }
        const cplx c = -nn * std::polar(1.0, -theta) * wrap;
        const int col = t1 * n + t2;
        h(row, col) += c;
        h(col, row) += std::conj(c);
      }
    }
  return h;
}

std::vector<double> lowest_dense(const Eigen::MatrixXcd& h, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (int i = 0; i < k; ++i) out.push_back(es.eigenvalues()[i]);
  return out;
}

std::map<IVec2, cplx> density_dft(const magque::GridWavefunction& u, int k_max) {
  const int n = u.n();
  const double pi = std::acos(-1.0);
  double total = 0.0;
  for (int j1 = 0; j1 < n; ++j1)
    for (int j2 = 0; j2 < n; ++j2) total += std::norm(u(j1, j2));
  std::map<IVec2, cplx> out;
  for (int k1 = -k_max; k1 <= k_max; ++k1)
    for (int k2 = -k_max; k2 <= k_max; ++k2) {
      cplx acc = 0.0;
      for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2)
          acc += std::polar(std::norm(u(j1, j2)), -2.0 * pi * (k1 * j1 + k2 * j2) / n);
      out[{k1, k2}] = acc / total;
    }
  return out;
}

std::vector<magque::FourierMode> random_modes(std::uint64_t seed, int phi, int kmax, double amp) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-amp, amp);
  std::vector<magque::FourierMode> out{{{0, 0}, {2.0 * std::acos(-1.0) * phi, 0.0}}};
  for (int k1 = 0; k1 <= kmax; ++k1)
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      out.push_back({{k1, k2}, {uni(rng), uni(rng)}});
    }
  return out;
}

magque::RealFourierSeries random_periodic(std::uint64_t seed, int kmax, double amp) {
  auto modes = random_modes(seed, 0, kmax, amp);
  modes.erase(modes.begin());
  return magque::RealFourierSeries(modes);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle

#include "magque/quantization.hpp"

#include <fftw3.h>

#include "fft_support.hpp"

#include <mutex>
#include <sstream>
#include <thread>

namespace magque {

namespace {

cplx expi(double t) { return {std::cos(t), std::sin(t)}; }

using detail::fftw_planner_mutex;

}  // namespace

std::mutex& detail::fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// ---- symbols ----

BandLimitedSymbol BandLimitedSymbol::position(std::vector<FourierMode> modes, std::string name) {
  auto m = std::make_shared<std::map<IVec2, cplx>>();
  for (const auto& f : modes) (*m)[f.k] += f.c;
  BandLimitedSymbol s;
  s.constants_ = std::move(m);
  s.name_ = std::move(name);
  return s;
}

BandLimitedSymbol BandLimitedSymbol::phase_space(std::map<IVec2, Profile> modes, double xi_max,
                                                 std::string name) {
  if (!(xi_max > 0.0)) throw ValidationError("symbol support radius must be positive");
  BandLimitedSymbol s;
  s.profiles_ = std::make_shared<std::map<IVec2, Profile>>(std::move(modes));
  s.xi_max_ = xi_max;
  s.name_ = std::move(name);
  return s;
}

int BandLimitedSymbol::k_sym() const {
  int k = 0;
  for (const auto& w : wavevectors()) k = std::max(k, inorm_inf(w));
  return k;
}

std::vector<IVec2> BandLimitedSymbol::wavevectors() const {
  std::vector<IVec2> out;
  if (constants_)
    for (const auto& [k, c] : *constants_) out.push_back(k);
  else
    for (const auto& [k, p] : *profiles_) out.push_back(k);
  return out;
}

cplx BandLimitedSymbol::constant(const IVec2& k) const {
  if (!constants_) throw ValidationError("symbol depends on xi");
  auto it = constants_->find(k);
  return it == constants_->end() ? cplx(0.0) : it->second;
}

cplx BandLimitedSymbol::mode(const IVec2& k, const Vec2& xi) const {
  if (constants_) return constant(k);
  if (norm(xi) > xi_max_) return 0.0;
  auto it = profiles_->find(k);
  return it == profiles_->end() ? cplx(0.0) : it->second(xi);
}

cplx BandLimitedSymbol::operator()(const Vec2& x, const Vec2& xi) const {
  cplx s = 0.0;
  for (const auto& k : wavevectors()) s += mode(k, xi) * expi(kTwoPi * (k[0] * x[0] + k[1] * x[1]));
  return s;
}

BandLimitedSymbol BandLimitedSymbol::product(const BandLimitedSymbol& b) const {
  const std::string nm = name_ + "*" + b.name_;
  if (constants_ && b.constants_) {
    std::map<IVec2, cplx> m;
    for (const auto& [k1, c1] : *constants_)
      for (const auto& [k2, c2] : *b.constants_) m[{k1[0] + k2[0], k1[1] + k2[1]}] += c1 * c2;
    std::vector<FourierMode> modes;
    for (const auto& [k, c] : m) modes.push_back({k, c});
    return position(std::move(modes), nm);
  }
  std::map<IVec2, std::vector<std::pair<IVec2, IVec2>>> pairs;
  for (const auto& k1 : wavevectors())
    for (const auto& k2 : b.wavevectors()) pairs[{k1[0] + k2[0], k1[1] + k2[1]}].push_back({k1, k2});
  auto self = std::make_shared<BandLimitedSymbol>(*this);
  auto other = std::make_shared<BandLimitedSymbol>(b);
  std::map<IVec2, Profile> modes;
  for (auto& [k, list] : pairs)
    modes[k] = [self, other, list](const Vec2& xi) {
      cplx s = 0.0;
      for (const auto& [k1, k2] : list) s += self->mode(k1, xi) * other->mode(k2, xi);
      return s;
    };
  return phase_space(std::move(modes), std::min(xi_max_, b.xi_max_), nm);
}

bool BandLimitedSymbol::is_real(double tol) const {
  const double r = std::isfinite(xi_max_) ? xi_max_ : 2.0;
  for (const auto& k : wavevectors()) {
    const IVec2 mk{-k[0], -k[1]};
    for (int i = -4; i <= 4; ++i)
      for (int j = -4; j <= 4; ++j) {
        const Vec2 xi{r * i / 4.0, r * j / 4.0};
        const cplx a = mode(k, xi), b = mode(mk, xi);
        if (std::abs(a - std::conj(b)) > tol * std::max(1.0, std::abs(a))) return false;
      }
  }
  return true;
}

namespace profiles {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double chi(double t) { return smooth_step((0.5 - std::abs(t)) / 0.25); }

Profile shell_cutoff(double delta, double h, const Vec2& alpha) {
  return [=](const Vec2& xi) -> cplx {
    const double r = std::hypot(xi[0] - h * alpha[0], xi[1] - h * alpha[1]);
    return chi((r - 1.0) / delta);
  };
}

Profile radial_plateau(double r_in, double r_out, double width) {
  return [=](const Vec2& xi) -> cplx {
    const double r = norm(xi);
    return smooth_step((r - (r_in - width)) / width) * smooth_step((r_out + width - r) / width);
  };
}

Profile disk(double r, double width) {
  return [=](const Vec2& xi) -> cplx { return smooth_step((r + width - norm(xi)) / width); };
}

Profile gaussian_shell(double r0, double s, double xi_max) {
  return [=](const Vec2& xi) -> cplx {
    const double r = norm(xi);
    const double w = 0.1 * xi_max;
    return std::exp(-(r - r0) * (r - r0) / (2 * s * s)) * smooth_step((xi_max - r) / w);
  };
}

Profile gaussian(const Vec2& c, double s, double xi_max) {
  return [=](const Vec2& xi) -> cplx {
    const double d0 = xi[0] - c[0], d1 = xi[1] - c[1];
    const double w = 0.1 * xi_max;
    return std::exp(-(d0 * d0 + d1 * d1) / (2 * s * s)) * smooth_step((xi_max - norm(xi)) / w);
  };
}

Profile scaled(Profile p, cplx factor) {
  return [p = std::move(p), factor](const Vec2& xi) { return factor * p(xi); };
}

}  // namespace profiles

// ---- Weyl operators ----

std::size_t AmbiguityTable::index(const IVec2& k, const IVec2& s) const {
  if (inorm_inf(k) > k_sym || inorm_inf(s) > j) throw SymbolRangeExceeded("index outside the table");
  const std::size_t kk = std::size_t(k[0] + k_sym) * side_k() + (k[1] + k_sym);
  return (kk * side_s() + (s[0] + j)) * side_s() + (s[1] + j);
}

GridWavefunction weyl_apply_shift(const GridWavefunction& u, const IVec2& k, const IVec2& s) {
  const int n = u.n();
  GridWavefunction out(n, u.flux(), u.origin());
  const double phi = u.flux();
  const cplx half = expi(kPi * (k[0] * s[0] + k[1] * s[1]) / n);
  for (int j1 = 0; j1 < n; ++j1)
    for (int j2 = 0; j2 < n; ++j2) {
      const Vec2 x = u.position(j1, j2);
      const double t = kPi * phi * (s[0] * x[1] - s[1] * x[0]) / n + kTwoPi * (k[0] * x[0] + k[1] * x[1]);
      out(j1, j2) = expi(t) * half * u.at(j1 + s[0], j2 + s[1]);
    }
  return out;
}

GridWavefunction weyl_apply(const GridWavefunction& u, const IVec2& k, const Vec2& zeta, double h) {
  IVec2 s;
  for (int d = 0; d < 2; ++d) {
    const double v = h * zeta[d] * u.n();
    s[d] = int(std::lround(v));
    if (std::abs(v - s[d]) > 1e-9) {
      std::ostringstream os;
      os << "h*zeta*N = " << v << " is not an integer";
      throw IncommensurableShift(os.str());
    }
  }
  return weyl_apply_shift(u, k, s);
}

AmbiguityTable ambiguity_table(const GridWavefunction& u, double h, int k_sym, int j, int threads) {
  const int n = u.n();
  if (!(n * h >= 1.0)) {
    std::ostringstream os;
    os << "N*h = " << n * h << " < 1";
    throw GridTooCoarseForH(os.str());
  }
  if (2 * k_sym >= n) throw GridTooCoarse("wavevector window exceeds the grid Nyquist range");
  if (j < 0 || k_sym < 0) throw ValidationError("table ranges must be nonnegative");
  AmbiguityTable tab;
  tab.h = h;
  tab.n = n;
  tab.k_sym = k_sym;
  tab.j = j;
  tab.values.assign(std::size_t(tab.side_k()) * tab.side_k() * tab.side_s() * tab.side_s(), 0.0);

  const std::size_t nn = std::size_t(n) * n;
  fftw_plan plan;
  fftw_complex* probe_in = fftw_alloc_complex(nn);
  fftw_complex* probe_out = fftw_alloc_complex(nn);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_2d(n, n, probe_in, probe_out, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  const double phi = u.flux();
  const int side = tab.side_s();
  const int total = side * side;

  auto work = [&](int first, int last, fftw_complex* in, fftw_complex* out) {
    auto* p = reinterpret_cast<cplx*>(in);
    const auto* f = reinterpret_cast<const cplx*>(out);
    for (int idx = first; idx < last; ++idx) {
      const IVec2 s{idx / side - j, idx % side - j};
      for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2) {
          const Vec2 x = u.position(j1, j2);
          const double t = kPi * phi * (s[0] * x[1] - s[1] * x[0]) / n;
          p[std::size_t(j1) * n + j2] = expi(t) * u.at(j1 + s[0], j2 + s[1]) * std::conj(u(j1, j2));
        }
      fftw_execute_dft(plan, in, out);
      for (int k1 = -k_sym; k1 <= k_sym; ++k1)
        for (int k2 = -k_sym; k2 <= k_sym; ++k2) {
          const std::size_t q = std::size_t((k1 + n) % n) * n + (k2 + n) % n;
          tab.at({k1, k2}, s) = f[q] * expi(kPi * (k1 * s[0] + k2 * s[1]) / n) / double(nn);
        }
    }
  };

  threads = std::max(1, std::min(threads, total));
  if (threads == 1) {
    work(0, total, probe_in, probe_out);
  } else {
    std::vector<std::thread> pool;
    std::vector<fftw_complex*> bufs;
    for (int t = 0; t < threads; ++t) {
      fftw_complex* in = fftw_alloc_complex(nn);
      fftw_complex* out = fftw_alloc_complex(nn);
      bufs.push_back(in);
      bufs.push_back(out);
      const int first = int(std::int64_t(total) * t / threads);
      const int last = int(std::int64_t(total) * (t + 1) / threads);
      pool.emplace_back(work, first, last, in, out);
    }
    for (auto& th : pool) th.join();
    for (auto* b : bufs) fftw_free(b);
  }
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(probe_in);
  fftw_free(probe_out);
  return tab;
}

// ---- pairing ----

Eigen::MatrixXcd symbol_fourier(const BandLimitedSymbol& sym, const IVec2& k, double delta, int j) {
  if (sym.xi_independent()) throw ValidationError("the xi transform of a position symbol is a delta");
  const double xi_max = sym.xi_max();
  if (!std::isfinite(xi_max)) throw SymbolRangeExceeded("symbol has no compact xi support");
  const double zmax = j * delta;
  double step = xi_max / 64.0;
  if (zmax > 0.0) step = std::min(step, kPi / (1.1 * zmax));
  const int half = int(std::ceil(xi_max / step));
  step = xi_max / half;
  const int m = 2 * half + 1;
  Eigen::MatrixXcd g(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) g(a, b) = sym.mode(k, {(a - half) * step, (b - half) * step});
  const int side = 2 * j + 1;
  Eigen::MatrixXcd e(side, m);
  for (int s = 0; s < side; ++s)
    for (int a = 0; a < m; ++a) e(s, a) = expi(-(s - j) * delta * (a - half) * step);
  return (step * step) * (e * g * e.transpose());
}

double zeta_tail(const BandLimitedSymbol& sym, double delta, int j) {
  if (sym.xi_independent()) return 0.0;
  double worst = 0.0;
  for (const auto& k : sym.wavevectors()) {
    const Eigen::MatrixXcd f = symbol_fourier(sym, k, delta, 2 * j);
    double s = 0.0;
    for (int a = 0; a <= 4 * j; ++a)
      for (int b = 0; b <= 4 * j; ++b)
        if (std::max(std::abs(a - 2 * j), std::abs(b - 2 * j)) > j) s += std::abs(f(a, b));
    worst = std::max(worst, s * delta * delta);
  }
  return worst;
}

int choose_zeta_cutoff(const BandLimitedSymbol& sym, double delta, double tol, int max_j) {
  if (sym.xi_independent()) return 0;
  for (int j = 4; j <= max_j; j *= 2)
    if (zeta_tail(sym, delta, j) < tol) return j;
  throw SymbolRangeExceeded("zeta tail does not fall below tolerance within the allowed range");
}

cplx wigner_pair(const BandLimitedSymbol& sym, const AmbiguityTable& tab) {
  if (sym.k_sym() > tab.k_sym) {
    std::ostringstream os;
    os << "symbol uses |k| up to " << sym.k_sym() << ", table holds " << tab.k_sym;
    throw SymbolRangeExceeded(os.str());
  }
  cplx acc = 0.0;
  if (sym.xi_independent()) {
    for (const auto& k : sym.wavevectors()) acc += sym.constant(k) * tab.at(k, {0, 0});
    return acc;
  }
  const double delta = tab.zeta_step();
  for (const auto& k : sym.wavevectors()) {
    const Eigen::MatrixXcd f = symbol_fourier(sym, k, delta, tab.j);
    for (int a = -tab.j; a <= tab.j; ++a)
      for (int b = -tab.j; b <= tab.j; ++b) acc += f(a + tab.j, b + tab.j) * tab.at(k, {a, b});
  }
  return acc * (delta * delta / (4.0 * kPi * kPi));
}

GridWavefunction weyl_quantize_apply(const BandLimitedSymbol& sym, const GridWavefunction& v, double h,
                                     int j) {
  const int n = v.n();
  GridWavefunction out(n, v.flux(), v.origin());
  if (sym.xi_independent()) {
    for (int j1 = 0; j1 < n; ++j1)
      for (int j2 = 0; j2 < n; ++j2) {
        const Vec2 x = v.position(j1, j2);
        cplx a = 0.0;
        for (const auto& k : sym.wavevectors())
          a += sym.constant(k) * expi(kTwoPi * (k[0] * x[0] + k[1] * x[1]));
        out(j1, j2) = a * v(j1, j2);
      }
    return out;
  }
  if (!(n * h >= 1.0)) throw GridTooCoarseForH("N*h < 1");
  const double delta = 1.0 / (n * h);
  const double w = delta * delta / (4.0 * kPi * kPi);
  const double phi = v.flux();
  for (const auto& k : sym.wavevectors()) {
    const Eigen::MatrixXcd f = symbol_fourier(sym, k, delta, j);
    const double fmax = f.cwiseAbs().maxCoeff();
    for (int a = -j; a <= j; ++a)
      for (int b = -j; b <= j; ++b) {
        const cplx c = f(a + j, b + j);
        if (std::abs(c) <= 1e-17 * fmax) continue;
        const cplx coef = w * c * expi(kPi * (k[0] * a + k[1] * b) / n);
        for (int j1 = 0; j1 < n; ++j1)
          for (int j2 = 0; j2 < n; ++j2) {
            const Vec2 x = v.position(j1, j2);
            const double t = kPi * phi * (a * x[1] - b * x[0]) / n + kTwoPi * (k[0] * x[0] + k[1] * x[1]);
            out(j1, j2) += coef * expi(t) * v.at(j1 + a, j2 + b);
          }
      }
  }
  return out;
}

double composition_residual(const BandLimitedSymbol& a, const BandLimitedSymbol& b, double h,
                            const std::vector<GridWavefunction>& test_vectors, int j) {
  const BandLimitedSymbol ab = a.product(b);
  double worst = 0.0;
  for (const auto& v : test_vectors) {
    GridWavefunction lhs = weyl_quantize_apply(a, weyl_quantize_apply(b, v, h, j), h, j);
    lhs -= weyl_quantize_apply(ab, v, h, j);
    worst = std::max(worst, lhs.norm() / v.norm());
  }
  return worst;
}

// ---- averaging ----

BandLimitedSymbol averaged_symbol(const BandLimitedSymbol& sym, double h, double b0, const Vec2& alpha,
                                  int m) {
  if (h * b0 == 0.0) throw ZeroField("averaging needs h*B0 != 0");
  auto src = std::make_shared<BandLimitedSymbol>(sym);
  const Vec2 ha{h * alpha[0], h * alpha[1]};
  std::map<IVec2, Profile> modes;
  for (const auto& k : sym.wavevectors()) {
    modes[k] = [src, k, ha, h, b0, m](const Vec2& xi) -> cplx {
      const Vec2 w{xi[0] - ha[0], xi[1] - ha[1]};
      const double amp = kTwoPi * knorm(k) * norm(w) / std::abs(h * b0);
      const int nodes = m > 0 ? m : 64 + 2 * int(std::ceil(amp));
      const Vec2 wp = perp(w);
      cplx acc = 0.0;
      for (int i = 0; i < nodes; ++i) {
        const double t = kTwoPi * i / nodes;
        const Vec2 r = rotate_j(t, w);
        const Vec2 jr{r[1], -r[0]};
        const Vec2 shift{(wp[0] - jr[0]) / (h * b0), (wp[1] - jr[1]) / (h * b0)};
        acc += src->mode(k, {r[0] + ha[0], r[1] + ha[1]}) *
               expi(kTwoPi * (k[0] * shift[0] + k[1] * shift[1]));
      }
      return acc / double(nodes);
    };
  }
  const double xi_max = sym.xi_max() + 2.0 * norm(ha);
  return BandLimitedSymbol::phase_space(std::move(modes), xi_max, "<" + sym.name() + ">");
}

}  // namespace magque

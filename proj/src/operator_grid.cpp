#include "magque/operator_grid.hpp"

#include <random>
#include <sstream>

namespace magque {

namespace {

int floor_div(int a, int n) { return a >= 0 ? a / n : -((-a + n - 1) / n); }

cplx wrap_phase(const Vec2& y, const IVec2& m, double phi) {
  const double t = kPi * phi * (m[0] * y[1] - m[1] * y[0]);
  cplx p(std::cos(t), std::sin(t));
  const long long iphi = std::llround(phi);
  if (double(iphi) == phi && ((iphi * m[0] * m[1]) & 1LL)) p = -p;
  return p;
}

}  // namespace

GridWavefunction::GridWavefunction(int n, int flux_phi, IVec2 origin)
    : n_(n), phi_(flux_phi), origin_(origin), values_(std::size_t(n) * n, cplx(0.0)) {
  if (n <= 0) throw GridTooCoarse("grid size must be positive");
}

Vec2 GridWavefunction::position(int j1, int j2) const {
  return {origin_[0] + double(j1) / n_, origin_[1] + double(j2) / n_};
}

cplx GridWavefunction::at(int j1, int j2) const {
  const IVec2 m{floor_div(j1, n_), floor_div(j2, n_)};
  const int i1 = j1 - m[0] * n_, i2 = j2 - m[1] * n_;
  const cplx v = (*this)(i1, i2);
  if (m[0] == 0 && m[1] == 0) return v;
  return wrap_phase(position(i1, i2), m, phi_) * v;
}

double GridWavefunction::norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(s) / n_;
}

void GridWavefunction::check_compatible(const GridWavefunction& v) const {
  if (v.n_ != n_ || v.phi_ != phi_) {
    std::ostringstream os;
    os << "grid " << n_ << "/flux " << phi_ << " vs grid " << v.n_ << "/flux " << v.phi_;
    throw DimMismatch(os.str());
  }
  if (v.origin_ != origin_) throw OriginMismatch("wavefunctions live on different squares");
}

cplx GridWavefunction::inner(const GridWavefunction& v) const {
  check_compatible(v);
  cplx s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * std::conj(v.values_[i]);
  return s / double(n_ * n_);
}

void GridWavefunction::normalize() {
  const double nr = norm();
  if (nr == 0.0) throw ZeroVector("cannot normalize the zero wavefunction");
  for (auto& v : values_) v /= nr;
}

GridWavefunction& GridWavefunction::operator+=(const GridWavefunction& v) {
  check_compatible(v);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += v.values_[i];
  return *this;
}

GridWavefunction& GridWavefunction::operator-=(const GridWavefunction& v) {
  check_compatible(v);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= v.values_[i];
  return *this;
}

GridWavefunction& GridWavefunction::operator*=(cplx a) {
  for (auto& v : values_) v *= a;
  return *this;
}

GridWavefunction operator+(GridWavefunction a, const GridWavefunction& b) { return a += b; }
GridWavefunction operator-(GridWavefunction a, const GridWavefunction& b) { return a -= b; }
GridWavefunction operator*(cplx s, GridWavefunction a) { return a *= s; }

GridWavefunction random_wavefunction(int n, int flux_phi, std::uint64_t seed, IVec2 origin) {
  GridWavefunction u(n, flux_phi, origin);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (auto& v : u.values()) {
    const double re = g(rng);
    v = cplx(re, g(rng));
  }
  u.normalize();
  return u;
}

SparseHermitianOperator assemble(const GaugePotential& gauge, const ScalarPotential& potential, int n,
                                 AssemblyOptions opts) {
  const int k = std::max(gauge.bandlimit(), potential.bandlimit());
  if (n < 8 || n % 2 != 0 || n < 4 * k) {
    std::ostringstream os;
    os << "n=" << n << " must be even, >= 8 and >= 4*bandlimit (bandlimit " << k << ")";
    throw GridTooCoarse(os.str());
  }
  SparseHermitianOperator h;
  h.n_ = n;
  h.phi_ = gauge.flux();
  h.gauge_ = gauge;
  h.potential_ = potential;
  h.opts_ = opts;
  const std::size_t dim = std::size_t(n) * n;
  const double n2 = double(n) * n;
  const double wrap_flux = opts.wrap_flux_override.value_or(double(h.phi_));
  const IVec2& o = opts.origin;
  h.diag_.assign(dim, 0.0);
  for (int d = 0; d < 2; ++d) {
    h.fwd_[d].assign(dim, cplx(0.0));
    h.bwd_[d].assign(dim, cplx(0.0));
  }
  for (int j1 = 0; j1 < n; ++j1)
    for (int j2 = 0; j2 < n; ++j2) {
      const std::size_t i = GridWavefunction::index(n, j1, j2);
      const Vec2 x{o[0] + double(j1) / n, o[1] + double(j2) / n};
      h.diag_[i] = 4.0 * n2 + potential(x);
      for (int d = 0; d < 2; ++d) {
        const double theta = gauge.link_integral(x, d, 1.0 / n);
        cplx c = -n2 * cplx(std::cos(theta), -std::sin(theta));
        int t1 = j1, t2 = j2;
        (d == 0 ? t1 : t2) += 1;
        IVec2 m{0, 0};
        if (t1 == n) t1 = 0, m[0] = 1;
        if (t2 == n) t2 = 0, m[1] = 1;
        if (m[0] || m[1]) {
          const Vec2 y{o[0] + double(t1) / n, o[1] + double(t2) / n};
          c *= wrap_phase(y, m, wrap_flux);
        }
        h.fwd_[d][i] = c;
        h.bwd_[d][GridWavefunction::index(n, t1, t2)] = std::conj(c);
      }
    }
  return h;
}

void SparseHermitianOperator::apply(const cplx* in, cplx* out) const {
  const int n = n_;
  const double* dg = diag_.data();
  const cplx *f0 = fwd_[0].data(), *f1 = fwd_[1].data();
  const cplx *b0 = bwd_[0].data(), *b1 = bwd_[1].data();
  for (int j1 = 0; j1 < n; ++j1) {
    const std::size_t row = std::size_t(j1) * n;
    const std::size_t up = std::size_t(j1 + 1 == n ? 0 : j1 + 1) * n;
    const std::size_t dn = std::size_t(j1 == 0 ? n - 1 : j1 - 1) * n;
    for (int j2 = 0; j2 < n; ++j2) {
      const std::size_t i = row + j2;
      const int r = j2 + 1 == n ? 0 : j2 + 1;
      const int l = j2 == 0 ? n - 1 : j2 - 1;
      out[i] = dg[i] * in[i] + f0[i] * in[up + j2] + b0[i] * in[dn + j2] + f1[i] * in[row + r] +
               b1[i] * in[row + l];
    }
  }
}

GridWavefunction SparseHermitianOperator::apply(const GridWavefunction& u) const {
  if (u.n() != n_ || u.flux() != phi_) {
    std::ostringstream os;
    os << "operator on grid " << n_ << "/flux " << phi_ << ", wavefunction on grid " << u.n()
       << "/flux " << u.flux();
    throw DimMismatch(os.str());
  }
  if (u.origin() != opts_.origin) throw OriginMismatch("operator and wavefunction squares differ");
  GridWavefunction out(n_, phi_, opts_.origin);
  apply(u.data(), out.data());
  return out;
}

GridWavefunction apply(const SparseHermitianOperator& h, const GridWavefunction& u) {
  return h.apply(u);
}

double SparseHermitianOperator::gershgorin_upper() const {
  double g = 0.0;
  for (std::size_t i = 0; i < diag_.size(); ++i)
    g = std::max(g, diag_[i] + std::abs(fwd_[0][i]) + std::abs(fwd_[1][i]) + std::abs(bwd_[0][i]) +
                        std::abs(bwd_[1][i]));
  return g;
}

double SparseHermitianOperator::gershgorin_lower() const {
  double g = diag_.empty() ? 0.0 : diag_[0];
  for (std::size_t i = 0; i < diag_.size(); ++i)
    g = std::min(g, diag_[i] - std::abs(fwd_[0][i]) - std::abs(fwd_[1][i]) - std::abs(bwd_[0][i]) -
                        std::abs(bwd_[1][i]));
  return g;
}

Eigen::MatrixXcd SparseHermitianOperator::to_dense() const {
  const int n = n_, dim = n * n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j1 = 0; j1 < n; ++j1)
    for (int j2 = 0; j2 < n; ++j2) {
      const int i = j1 * n + j2;
      m(i, i) += diag_[i];
      m(i, ((j1 + 1) % n) * n + j2) += fwd_[0][i];
      m(i, ((j1 + n - 1) % n) * n + j2) += bwd_[0][i];
      m(i, j1 * n + (j2 + 1) % n) += fwd_[1][i];
      m(i, j1 * n + (j2 + n - 1) % n) += bwd_[1][i];
    }
  return m;
}

SparseHermitianOperator SparseHermitianOperator::translated(const IVec2& m) const {
  AssemblyOptions o = opts_;
  o.origin = {opts_.origin[0] + m[0], opts_.origin[1] + m[1]};
  return assemble(gauge_, potential_, n_, o);
}

GridWavefunction magnetic_translate(const GridWavefunction& u, const IVec2& m) {
  const int n = u.n();
  GridWavefunction v(n, u.flux(), {u.origin()[0] + m[0], u.origin()[1] + m[1]});
  if (m[0] == 0 && m[1] == 0) return u;
  const double phi = u.flux();
  const double sign = ((long long)u.flux() * m[0] * m[1]) & 1LL ? -1.0 : 1.0;
  for (int j1 = 0; j1 < n; ++j1)
    for (int j2 = 0; j2 < n; ++j2) {
      const Vec2 x = v.position(j1, j2);
      const double t = kPi * phi * (m[0] * x[1] - m[1] * x[0]);
      v(j1, j2) = sign * cplx(std::cos(t), std::sin(t)) * u(j1, j2);
    }
  return v;
}

double commutation_residual(const SparseHermitianOperator& h, const IVec2& m, std::uint64_t seed,
                            int samples) {
  const SparseHermitianOperator hm = h.translated(m);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const GridWavefunction u = random_wavefunction(h.n(), h.flux(), seed + s, h.origin());
    const GridWavefunction lhs = hm.apply(magnetic_translate(u, m));
    const GridWavefunction rhs = magnetic_translate(h.apply(u), m);
    worst = std::max(worst, (lhs - rhs).norm() / u.norm());
  }
  return worst;
}

}  // namespace magque

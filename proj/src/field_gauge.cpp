#include "magque/field_gauge.hpp"

#include <algorithm>
#include <sstream>

namespace magque {

namespace {

constexpr double kRealTol = 1e-12;
constexpr double kFluxTol = 1e-9;

std::string kstr(const IVec2& k) {
  std::ostringstream os;
  os << "(" << k[0] << "," << k[1] << ")";
  return os.str();
}

bool close(cplx a, cplx b) {
  return std::abs(a - b) <= kRealTol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

cplx plane_wave(const IVec2& k, const Vec2& x) {
  const double t = kTwoPi * (k[0] * x[0] + k[1] * x[1]);
  return {std::cos(t), std::sin(t)};
}

}  // namespace

RealFourierSeries::RealFourierSeries(std::span<const FourierMode> modes) {
  for (const auto& m : modes) {
    auto it = modes_.find(m.k);
    if (it != modes_.end()) {
      if (!close(it->second, m.c))
        throw NonRealField("conflicting coefficients for k=" + kstr(m.k));
      continue;
    }
    modes_[m.k] = m.c;
  }
  for (auto& [k, c] : std::map<IVec2, cplx>(modes_)) {
    const IVec2 mk{-k[0], -k[1]};
    if (k == mk) {
      if (std::abs(c.imag()) > kRealTol * std::max(1.0, std::abs(c)))
        throw NonRealField("mean coefficient is not real");
      modes_[k] = c.real();
      continue;
    }
    auto it = modes_.find(mk);
    if (it == modes_.end()) {
      modes_[mk] = std::conj(c);
    } else if (!close(it->second, std::conj(c))) {
      throw NonRealField("coefficient at " + kstr(mk) + " is not the conjugate of " + kstr(k));
    }
  }
  for (auto it = modes_.begin(); it != modes_.end();) {
    if (it->second == cplx(0.0)) it = modes_.erase(it);
    else ++it;
  }
}

double RealFourierSeries::operator()(const Vec2& x) const {
  double s = 0.0;
  for (const auto& [k, c] : modes_) s += (c * plane_wave(k, x)).real();
  return s;
}

cplx RealFourierSeries::coefficient(const IVec2& k) const {
  auto it = modes_.find(k);
  return it == modes_.end() ? cplx(0.0) : it->second;
}

std::vector<FourierMode> RealFourierSeries::list() const {
  std::vector<FourierMode> out;
  for (const auto& [k, c] : modes_) out.push_back({k, c});
  return out;
}

int RealFourierSeries::bandlimit() const {
  int b = 0;
  for (const auto& [k, c] : modes_) b = std::max(b, inorm_inf(k));
  return b;
}

double RealFourierSeries::abs_sum(bool skip_zero) const {
  double s = 0.0;
  for (const auto& [k, c] : modes_)
    if (!(skip_zero && k == IVec2{0, 0})) s += std::abs(c);
  return s;
}

MagneticField::MagneticField(RealFourierSeries series) : series_(std::move(series)) {
  mean_ = series_.coefficient({0, 0}).real();
  const double r = mean_ / kTwoPi;
  const double rr = std::round(r);
  if (std::abs(r - rr) > kFluxTol) {
    std::ostringstream os;
    os << "mean field " << mean_ << " is not 2*pi times an integer";
    throw FluxNotQuantized(os.str());
  }
  phi_ = int(rr);
}

MagneticField build_field(std::span<const FourierMode> modes) {
  return MagneticField(RealFourierSeries(modes));
}

double eval_field(const MagneticField& field, const Vec2& x) { return field(x); }

GaugePotential::GaugePotential(double b0, std::map<IVec2, std::array<cplx, 2>> aper, Vec2 alpha)
    : b0_(b0), aper_(std::move(aper)), alpha_(alpha) {}

int GaugePotential::flux() const { return int(std::lround(b0_ / kTwoPi)); }

int GaugePotential::bandlimit() const {
  int b = 0;
  for (const auto& [k, c] : aper_) b = std::max(b, inorm_inf(k));
  return b;
}

Vec2 GaugePotential::periodic(const Vec2& x) const {
  Vec2 a{0.0, 0.0};
  for (const auto& [k, c] : aper_) {
    const cplx e = plane_wave(k, x);
    a[0] += (c[0] * e).real();
    a[1] += (c[1] * e).real();
  }
  return a;
}

Vec2 GaugePotential::operator()(const Vec2& x) const {
  const Vec2 p = periodic(x);
  return {alpha_[0] - 0.5 * b0_ * x[1] + p[0], alpha_[1] + 0.5 * b0_ * x[0] + p[1]};
}

double GaugePotential::curl(const Vec2& x) const {
  double s = b0_;
  for (const auto& [k, c] : aper_) {
    const cplx e = plane_wave(k, x);
    s += (kI * kTwoPi * (double(k[0]) * c[1] - double(k[1]) * c[0]) * e).real();
  }
  return s;
}

double GaugePotential::link_integral(const Vec2& x, int d, double len) const {
  Vec2 mid = x;
  mid[d] += 0.5 * len;
  const double a0 = d == 0 ? -0.5 * b0_ * mid[1] : 0.5 * b0_ * mid[0];
  double s = (alpha_[d] + a0) * len;
  for (const auto& [k, c] : aper_) {
    const double kd = k[d];
    cplx w;
    if (kd == 0) {
      w = len;
    } else {
      const double t = kTwoPi * kd * len;
      w = (cplx(std::cos(t), std::sin(t)) - 1.0) / (kI * kTwoPi * kd);
    }
    s += (c[d] * plane_wave(k, x) * w).real();
  }
  return s;
}

GaugePotential build_gauge(const MagneticField& field, const Vec2& alpha) {
  std::map<IVec2, std::array<cplx, 2>> aper;
  for (const auto& [k, b] : field.series().modes()) {
    if (k == IVec2{0, 0}) continue;
    const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1];
    const cplx psi = -b / (4.0 * kPi * kPi * k2);
    aper[k] = {-kI * kTwoPi * double(k[1]) * psi, kI * kTwoPi * double(k[0]) * psi};
  }
  return GaugePotential(field.mean(), std::move(aper), alpha);
}

GaugePotential gauge_shift(const GaugePotential& gauge, const RealFourierSeries& phi) {
  auto aper = gauge.periodic_modes();
  for (const auto& [k, c] : phi.modes()) {
    if (k == IVec2{0, 0}) continue;
    auto& a = aper[k];
    a[0] += kI * kTwoPi * double(k[0]) * c;
    a[1] += kI * kTwoPi * double(k[1]) * c;
  }
  return GaugePotential(gauge.b0(), std::move(aper), gauge.alpha());
}

double verify_gauge(const GaugePotential& gauge, const MagneticField& field, int n) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 x{double(i) / n, double(j) / n};
      worst = std::max(worst, std::abs(gauge.curl(x) - field(x)));
    }
  return worst;
}

}  // namespace magque

#include "magque/lattice_control.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace magque {

Sublattice make_sublattice(const IVec2& k) {
  if (k[0] == 0 && k[1] == 0) throw ValidationError("zero vector generates no sublattice");
  const int g = std::gcd(std::abs(k[0]), std::abs(k[1]));
  IVec2 e{k[0] / g, k[1] / g};
  if (e[0] < 0 || (e[0] == 0 && e[1] < 0)) e = {-e[0], -e[1]};
  return Sublattice{e};
}

Sublattice sublattice_for_direction(const IVec2& direction) {
  return make_sublattice({direction[1], -direction[0]});
}

DirectionalAverage::DirectionalAverage(Sublattice lat, std::map<int, cplx> coeffs)
    : lat_(lat), coeffs_(std::move(coeffs)) {}

double DirectionalAverage::operator()(double s) const { return derivative(s, 0); }

double DirectionalAverage::at(const Vec2& x) const {
  return (*this)(lat_.e[0] * x[0] + lat_.e[1] * x[1]);
}

double DirectionalAverage::derivative(double s, int order) const {
  double acc = 0.0;
  for (const auto& [j, c] : coeffs_) {
    if (order > 0 && j == 0) continue;
    const double t = kTwoPi * j * s;
    acc += (c * std::pow(kI * (kTwoPi * j), order) * cplx(std::cos(t), std::sin(t))).real();
  }
  return acc;
}

double DirectionalAverage::primitive(double s) const {
  double acc = 0.0;
  for (const auto& [j, c] : coeffs_) {
    if (j == 0) {
      acc += c.real() * s;
      continue;
    }
    const double t = kTwoPi * j * s;
    acc += (c * cplx(std::cos(t), std::sin(t)) / (kI * (kTwoPi * j))).real();
  }
  return acc;
}

double DirectionalAverage::lipschitz() const {
  double l = 0.0;
  for (const auto& [j, c] : coeffs_) l += kTwoPi * std::abs(j) * std::abs(c);
  return l;
}

MagneticField DirectionalAverage::as_field() const {
  std::vector<FourierMode> modes;
  for (const auto& [j, c] : coeffs_) modes.push_back({{j * lat_.e[0], j * lat_.e[1]}, c});
  return build_field(modes);
}

std::vector<Sublattice> relevant_sublattices(const MagneticField& field) {
  std::set<IVec2> seen;
  std::vector<Sublattice> out;
  for (const auto& [k, c] : field.series().modes()) {
    if (k == IVec2{0, 0}) continue;
    const Sublattice lat = make_sublattice(k);
    if (seen.insert(lat.e).second) out.push_back(lat);
  }
  return out;
}

DirectionalAverage directional_average(const MagneticField& field, const Sublattice& lat) {
  std::map<int, cplx> coeffs;
  coeffs[0] = field.mean();
  for (const auto& [k, c] : field.series().modes()) {
    if (k == IVec2{0, 0}) continue;
    // k = j e iff k is parallel to e
    if (k[0] * lat.e[1] - k[1] * lat.e[0] != 0) continue;
    const int j = lat.e[0] != 0 ? k[0] / lat.e[0] : k[1] / lat.e[1];
    coeffs[j] = c;
  }
  return DirectionalAverage(lat, std::move(coeffs));
}

std::function<double(const Vec2&)> b_infinity(const MagneticField& field, const Direction& dir) {
  if (!dir.rational) {
    const double b0 = field.mean();
    return [b0](const Vec2&) { return b0; };
  }
  const Sublattice lat = *dir.rational;
  const double tn = norm(dir.theta);
  const double c = std::abs(lat.e[0] * dir.theta[0] + lat.e[1] * dir.theta[1]) / (lat.length() * tn);
  if (tn == 0.0 || c > 1e-12)
    throw DirectionMismatch("direction is not orthogonal to the lattice generator");
  DirectionalAverage avg = directional_average(field, lat);
  return [avg](const Vec2& x) { return avg.at(x); };
}

namespace {

Vec2 anchor(const Sublattice& lat, double s) {
  const double l2 = double(lat.e[0]) * lat.e[0] + double(lat.e[1]) * lat.e[1];
  return {s * lat.e[0] / l2, s * lat.e[1] / l2};
}

double wrap01(double s) {
  s -= std::floor(s);
  return s >= 1.0 ? 0.0 : s;
}

// Newton on f' from s0, kept only if it stays within radius and does not increase |target|.
double polish_extremum(const DirectionalAverage& f, double s0, double radius) {
  double s = s0;
  for (int it = 0; it < 60; ++it) {
    const double d1 = f.derivative(s, 1), d2 = f.derivative(s, 2);
    if (d2 == 0.0) break;
    const double step = d1 / d2;
    s -= step;
    if (std::abs(s - s0) > radius) return s0;
    if (std::abs(step) < 1e-16) break;
  }
  return s;
}

}  // namespace

ControlCertificate certify_control(const MagneticField& field, int sample_density) {
  if (field.mean() <= 0.0) throw NonPositiveMeanFlux("mean field must be positive");
  ControlCertificate cert;
  cert.mean_flux = field.mean();
  constexpr int kMaxSamples = 1 << 24;
  for (const auto& lat : relevant_sublattices(field)) {
    const DirectionalAverage f = directional_average(field, lat);
    Witness w;
    w.lattice = lat;
    bool decided = false;
    for (int m = std::max(8, sample_density); m <= kMaxSamples; m *= 2) {
      int imin = 0;
      double fmin = f(0.0);
      for (int i = 1; i < m; ++i) {
        const double v = f(double(i) / m);
        if (v < fmin) fmin = v, imin = i;
      }
      const double s0 = double(imin) / m;
      double s = polish_extremum(f, s0, 1.0 / m);
      double v = f(s);
      if (!(f.derivative(s, 2) >= 0.0) || v > fmin) s = s0, v = fmin;
      w.min_value = v;
      w.argmin_s = wrap01(s);
      w.lower_bound = fmin - f.lipschitz() / (2.0 * m);
      w.samples = m;
      if (w.lower_bound > 0.0 || v <= 0.0) {
        decided = true;
        break;
      }
    }
    if (!decided) cert.exact = false;
    w.argmin = anchor(lat, w.argmin_s);
    cert.witnesses.push_back(w);
    ++cert.lattices_checked;
  }
  cert.pass = cert.exact;
  for (const auto& w : cert.witnesses)
    if (!(w.lower_bound > 0.0)) cert.pass = false;
  return cert;
}

std::vector<Vec2> critical_geodesics(const MagneticField& field, const Sublattice& lat, double tol) {
  const DirectionalAverage f = directional_average(field, lat);
  int jmax = 0;
  for (const auto& [j, c] : f.coeffs()) jmax = std::max(jmax, std::abs(j));
  const int m = std::max(256, 64 * jmax);
  std::vector<double> vals(m + 1);
  for (int i = 0; i <= m; ++i) vals[i] = f(double(i) / m);

  std::vector<double> roots;
  auto add = [&](double s) {
    s = wrap01(s);
    for (double r : roots) {
      const double d = std::abs(r - s);
      if (std::min(d, 1.0 - d) < 1e-7) return;
    }
    roots.push_back(s);
  };

  for (int i = 0; i < m; ++i) {
    const double a = vals[i], b = vals[i + 1];
    if (a == 0.0) {
      add(double(i) / m);
      continue;
    }
    if ((a < 0.0) != (b < 0.0) && b != 0.0) {
      double lo = double(i) / m, hi = double(i + 1) / m, flo = a;
      while (hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi), fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) lo = mid, flo = fm;
        else hi = mid;
      }
      add(0.5 * (lo + hi));
    }
  }
  // tangential zeros: sampled local extrema that polish to |f| <= tol
  for (int i = 0; i < m; ++i) {
    const double prev = vals[(i + m - 1) % m], cur = vals[i], next = vals[i + 1];
    const bool is_min = cur <= prev && cur <= next;
    const bool is_max = cur >= prev && cur >= next;
    if (!is_min && !is_max) continue;
    const double s = polish_extremum(f, double(i) / m, 1.0 / m);
    if (std::abs(f(s)) <= tol) add(s);
  }
  std::sort(roots.begin(), roots.end());
  std::vector<Vec2> out;
  for (double s : roots) out.push_back(anchor(lat, s));
  return out;
}

}  // namespace magque

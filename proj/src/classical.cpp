#include "magque/classical.hpp"

#include <random>
#include <sstream>
#include <thread>

namespace magque {

namespace {

struct State {
  double x1, x2, p1, p2;
};

State deriv(const MagneticField& f, const State& s) {
  const double b = f({s.x1, s.x2});
  return {s.p1, s.p2, -b * s.p2, b * s.p1};
}

State axpy(const State& s, double a, const State& d) {
  return {s.x1 + a * d.x1, s.x2 + a * d.x2, s.p1 + a * d.p1, s.p2 + a * d.p2};
}

State rk4(const MagneticField& f, const State& s, double dt) {
  const State k1 = deriv(f, s);
  const State k2 = deriv(f, axpy(s, 0.5 * dt, k1));
  const State k3 = deriv(f, axpy(s, 0.5 * dt, k2));
  const State k4 = deriv(f, axpy(s, dt, k3));
  return {s.x1 + dt / 6 * (k1.x1 + 2 * k2.x1 + 2 * k3.x1 + k4.x1),
          s.x2 + dt / 6 * (k1.x2 + 2 * k2.x2 + 2 * k3.x2 + k4.x2),
          s.p1 + dt / 6 * (k1.p1 + 2 * k2.p1 + 2 * k3.p1 + k4.p1),
          s.p2 + dt / 6 * (k1.p2 + 2 * k2.p2 + 2 * k3.p2 + k4.p2)};
}

double step_limit(const MagneticField& f, const Vec2& xi0) {
  return 0.01 / std::max(1.0, norm(xi0) * f.sup_bound());
}

void check_step(const MagneticField& f, const PhasePoint& p0, double dt) {
  const double lim = step_limit(f, p0.xi);
  if (!(dt > 0.0) || dt > lim * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "dt=" << dt << " exceeds " << lim;
    throw StepTooLarge(os.str());
  }
}

long step_count(double t_end, double dt) {
  return std::max(0L, long(std::llround(t_end / dt)));
}

double torus_distance(const Vec2& a, const Vec2& b) {
  double d2 = 0.0;
  for (int i = 0; i < 2; ++i) {
    double d = std::abs(a[i] - b[i]);
    d -= std::floor(d);
    d = std::min(d, 1.0 - d);
    d2 += d * d;
  }
  return std::sqrt(d2);
}

}  // namespace

Vec2 wrap_torus(const Vec2& x) {
  Vec2 y{x[0] - std::floor(x[0]), x[1] - std::floor(x[1])};
  for (auto& v : y)
    if (v >= 1.0) v = 0.0;
  return y;
}

OrbitSample integrate_magnetic(const MagneticField& field, const PhasePoint& p0, double t_end, double dt,
                               int stride) {
  check_step(field, p0, dt);
  stride = std::max(1, stride);
  OrbitSample out;
  State s{p0.x[0], p0.x[1], p0.xi[0], p0.xi[1]};
  const double speed0 = norm(p0.xi);
  const long steps = step_count(t_end, dt);
  out.times.push_back(0.0);
  out.points.push_back({wrap_torus(p0.x), p0.xi});
  for (long i = 1; i <= steps; ++i) {
    s = rk4(field, s, dt);
    out.speed_drift = std::max(out.speed_drift, std::abs(std::hypot(s.p1, s.p2) - speed0));
    if (i % stride == 0 || i == steps) {
      out.times.push_back(i * dt);
      out.points.push_back({wrap_torus({s.x1, s.x2}), {s.p1, s.p2}});
    }
  }
  return out;
}

PhasePoint magnetic_endpoint(const MagneticField& field, const PhasePoint& p0, double t_end, double dt) {
  check_step(field, p0, dt);
  State s{p0.x[0], p0.x[1], p0.xi[0], p0.xi[1]};
  const long steps = step_count(t_end, dt);
  for (long i = 0; i < steps; ++i) s = rk4(field, s, dt);
  return {{s.x1, s.x2}, {s.p1, s.p2}};
}

PhasePoint cyclotron_exact(double b, const PhasePoint& p0, double t) {
  if (b == 0.0) return {{p0.x[0] + t * p0.xi[0], p0.x[1] + t * p0.xi[1]}, p0.xi};
  // xi(t) = e^{btR} xi0 with R xi = xi^perp; x(t) = x0 - R (e^{btR} - I) xi0 / b
  const double c = std::cos(b * t), s = std::sin(b * t);
  const Vec2 xi{c * p0.xi[0] - s * p0.xi[1], s * p0.xi[0] + c * p0.xi[1]};
  const Vec2 d{xi[0] - p0.xi[0], xi[1] - p0.xi[1]};
  return {{p0.x[0] + d[1] / b, p0.x[1] - d[0] / b}, xi};
}

OrbitSample integrate_geodesic(const PhasePoint& p0, double t_end, int count) {
  OrbitSample out;
  count = std::max(1, count);
  for (int i = 0; i <= count; ++i) {
    const double t = t_end * i / count;
    out.times.push_back(t);
    out.points.push_back({wrap_torus({p0.x[0] + t * p0.xi[0], p0.x[1] + t * p0.xi[1]}), p0.xi});
  }
  return out;
}

PhasePoint phi_h_exact(const PhasePoint& p0, double h, double b0, const Vec2& alpha, double t) {
  const double hb = h * b0;
  if (hb == 0.0) throw ZeroField("the cyclotron flow needs h*B0 != 0");
  const Vec2 w{p0.xi[0] - h * alpha[0], p0.xi[1] - h * alpha[1]};
  const Vec2 rw = rotate_j(2.0 * t * hb, w);
  const Vec2 d = perp({rw[0] - w[0], rw[1] - w[1]});
  return {{p0.x[0] + d[0] / hb, p0.x[1] + d[1] / hb}, {h * alpha[0] + rw[0], h * alpha[1] + rw[1]}};
}

std::vector<PhasePoint> control_samples(int count, double r0, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PhasePoint> out;
  for (int i = 0; i < count; ++i) {
    const double x1 = u(rng), x2 = u(rng), th = kTwoPi * u(rng);
    out.push_back({{x1, x2}, {r0 * std::cos(th), r0 * std::sin(th)}});
  }
  return out;
}

ControlTimeReport control_time_check(const MagneticField& field, const Ball& omega, double t0, double r0,
                                     const std::vector<PhasePoint>& samples, int bins, int threads) {
  ControlTimeReport rep;
  rep.t0 = t0;
  rep.r0 = r0;
  rep.samples = int(samples.size());
  bins = std::max(1, bins);
  rep.histogram.assign(bins, 0);
  if (samples.empty()) return rep;

  std::vector<double> hit(samples.size(), -1.0);
  auto run = [&](std::size_t first, std::size_t last) {
    for (std::size_t i = first; i < last; ++i) {
      PhasePoint p = samples[i];
      double sp = norm(p.xi);
      if (sp == 0.0) p.xi = {r0, 0.0}, sp = r0;
      if (sp < r0) p.xi = {p.xi[0] * r0 / sp, p.xi[1] * r0 / sp};
      const double dt = 0.5 * step_limit(field, p.xi);
      State s{p.x[0], p.x[1], p.xi[0], p.xi[1]};
      const long steps = long(std::ceil(t0 / dt));
      if (torus_distance(p.x, omega.center) < omega.radius) {
        hit[i] = 0.0;
        continue;
      }
      for (long k = 1; k <= steps; ++k) {
        s = rk4(field, s, dt);
        if (torus_distance({s.x1, s.x2}, omega.center) < omega.radius) {
          hit[i] = k * dt;
          break;
        }
      }
    }
  };
  threads = std::max(1, std::min<int>(threads, int(samples.size())));
  if (threads == 1) {
    run(0, samples.size());
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back(run, samples.size() * t / threads, samples.size() * (t + 1) / threads);
    for (auto& th : pool) th.join();
  }
  for (double t : hit) {
    if (t < 0.0 || t > t0) continue;
    ++rep.hits;
    rep.first_hit_times.push_back(t);
    rep.histogram[std::min(bins - 1, int(t / t0 * bins))]++;
  }
  rep.fraction = double(rep.hits) / rep.samples;
  return rep;
}

LambdaOrbit integrate_x_lambda(const DirectionalAverage& avg, int sign, double s0, double eta0,
                               double t_end, double dt, int stride) {
  if (sign != 1 && sign != -1) throw ValidationError("sign must be +1 or -1");
  if (!(dt > 0.0)) throw StepTooLarge("dt must be positive");
  stride = std::max(1, stride);
  const double len = avg.lattice().length();
  auto energy = [&](double s, double eta) { return 0.5 * len * eta * eta - sign * avg.primitive(s); };
  auto f = [&](double s) { return sign * avg(s); };
  LambdaOrbit out;
  double s = s0, eta = eta0;
  const double e0 = energy(s, eta);
  out.times.push_back(0.0);
  out.s.push_back(s);
  out.eta.push_back(eta);
  const long steps = step_count(t_end, dt);
  for (long i = 1; i <= steps; ++i) {
    const double k1s = len * eta, k1e = f(s);
    const double k2s = len * (eta + 0.5 * dt * k1e), k2e = f(s + 0.5 * dt * k1s);
    const double k3s = len * (eta + 0.5 * dt * k2e), k3e = f(s + 0.5 * dt * k2s);
    const double k4s = len * (eta + dt * k3e), k4e = f(s + dt * k3s);
    s += dt / 6 * (k1s + 2 * k2s + 2 * k3s + k4s);
    eta += dt / 6 * (k1e + 2 * k2e + 2 * k3e + k4e);
    out.energy_drift = std::max(out.energy_drift, std::abs(energy(s, eta) - e0));
    if (i % stride == 0 || i == steps) {
      out.times.push_back(i * dt);
      out.s.push_back(s);
      out.eta.push_back(eta);
    }
  }
  return out;
}

double box_discrepancy(const std::vector<Vec2>& points, int m) {
  if (points.empty()) return 1.0;
  double worst = 0.0;
  for (int a = 1; a <= m; ++a)
    for (int b = 1; b <= m; ++b) {
      const double x = double(a) / m, y = double(b) / m;
      std::size_t c = 0;
      for (const auto& p : points)
        if (p[0] < x && p[1] < y) ++c;
      worst = std::max(worst, std::abs(double(c) / points.size() - x * y));
    }
  return worst;
}

}  // namespace magque

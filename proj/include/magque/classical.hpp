#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "magque/lattice_control.hpp"

namespace magque {

struct PhasePoint {
  Vec2 x{0.0, 0.0};
  Vec2 xi{0.0, 0.0};
};

struct OrbitSample {
  std::vector<double> times;
  std::vector<PhasePoint> points;  // x wrapped into [0,1)^2
  double speed_drift = 0.0;        // max | |xi(t)| - |xi(0)| |
};

Vec2 wrap_torus(const Vec2& x);

/// x' = xi, xi' = B(x) xi^perp by classical RK4 on the unwrapped lift; stride thins the stored samples.
OrbitSample integrate_magnetic(const MagneticField& field, const PhasePoint& p0, double t_end, double dt,
                               int stride = 1);

/// Same flow, returning the unwrapped terminal point.
PhasePoint magnetic_endpoint(const MagneticField& field, const PhasePoint& p0, double t_end, double dt);

/// Exact constant-field solution (unwrapped).
PhasePoint cyclotron_exact(double b, const PhasePoint& p0, double t);

/// (x + t xi, xi) sampled at count + 1 equally spaced times.
OrbitSample integrate_geodesic(const PhasePoint& p0, double t_end, int count = 1);

PhasePoint phi_h_exact(const PhasePoint& p0, double h, double b0, const Vec2& alpha, double t);

struct Ball {
  Vec2 center{0.5, 0.5};
  double radius = 0.1;
};

struct ControlTimeReport {
  int samples = 0;
  int hits = 0;
  double fraction = 0.0;
  std::vector<double> first_hit_times;  // hits only
  std::vector<int> histogram;           // counts of first-hit times in bins of t0 / bins
  double t0 = 0.0;
  double r0 = 0.0;
};

/// Initial data with |xi| = r0 from a seeded generator.
std::vector<PhasePoint> control_samples(int count, double r0, std::uint64_t seed);

/// Integrates each start point (momenta rescaled up to |xi| >= r0) and records first entry into omega.
ControlTimeReport control_time_check(const MagneticField& field, const Ball& omega, double t0, double r0,
                                     const std::vector<PhasePoint>& samples, int bins = 10,
                                     int threads = 1);

/// Orbit of the limiting flow along a lattice direction, with s = e.x mod 1 the coordinate
/// of unit period across the closed geodesics:
///   s' = L eta,  eta' = sign f(s),  E = L eta^2 / 2 - sign F(s)  conserved, F' = f.
struct LambdaOrbit {
  std::vector<double> times;
  std::vector<double> s;  // unwrapped
  std::vector<double> eta;
  double energy_drift = 0.0;
  std::string convention = "s = e.x mod 1; ds/dt = L*eta; deta/dt = sign*I(s)";
};

LambdaOrbit integrate_x_lambda(const DirectionalAverage& avg, int sign, double s0, double eta0,
                               double t_end, double dt = 1e-3, int stride = 1);

/// Box discrepancy of points on T^2 against an m x m grid of boxes [0,a) x [0,b).
double box_discrepancy(const std::vector<Vec2>& points, int m = 8);

}  // namespace magque

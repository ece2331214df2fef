#include <doctest.h>

#include <cmath>

#include "magque/field_gauge.hpp"
#include "../support/oracles.hpp"

using namespace magque;

namespace {

MagneticField cos_field(double amp) {
  const std::vector<FourierMode> m{{{0, 0}, kTwoPi}, {{1, 0}, amp / 2}, {{-1, 0}, amp / 2}};
  return build_field(m);
}

double curl_residual(const GaugePotential& g, const MagneticField& b) {
  const int n = 4 * std::max(1, std::max(b.bandlimit(), g.bandlimit()));
  return verify_gauge(g, b, n);
}

}  // namespace

TEST_CASE("constant field 4 pi has flux 2") {
  const std::vector<FourierMode> m{{{0, 0}, 4 * kPi}};
  const MagneticField b = build_field(m);
  CHECK(b.flux() == 2);
  CHECK(b.mean() == doctest::Approx(4 * kPi));
  CHECK(eval_field(b, {0.37, 0.81}) == doctest::Approx(4 * kPi));
}

TEST_CASE("cosine field evaluates to 4 pi and 0 on the extremal lines") {
  const MagneticField b = cos_field(kTwoPi);
  CHECK(std::abs(eval_field(b, {0.0, 0.9}) - 4 * kPi) < 1e-12);
  CHECK(std::abs(eval_field(b, {0.5, 0.3})) < 1e-12);
}

TEST_CASE("non-integer flux is rejected") {
  const std::vector<FourierMode> m{{{0, 0}, 3.0}};
  CHECK_THROWS_AS(build_field(m), FluxNotQuantized);
  const std::vector<FourierMode> near{{{0, 0}, kTwoPi + 1e-11}};
  CHECK(build_field(near).flux() == 1);
}

TEST_CASE("conflicting conjugate pairs are rejected") {
  const std::vector<FourierMode> bad{{{0, 0}, kTwoPi}, {{1, 0}, {1.0, 0.5}}, {{-1, 0}, {1.0, 0.5}}};
  CHECK_THROWS_AS(build_field(bad), NonRealField);
  const std::vector<FourierMode> dup{{{0, 0}, kTwoPi}, {{1, 2}, 1.0}, {{1, 2}, 2.0}};
  CHECK_THROWS_AS(build_field(dup), NonRealField);
  const std::vector<FourierMode> complex_mean{{{0, 0}, {kTwoPi, 0.1}}};
  CHECK_THROWS_AS(build_field(complex_mean), NonRealField);
}

TEST_CASE("missing conjugates are completed") {
  const std::vector<FourierMode> half{{{0, 0}, kTwoPi}, {{1, 0}, kPi}};
  const MagneticField b = build_field(half);
  CHECK(std::abs(eval_field(b, {0.5, 0.1})) < 1e-12);
  CHECK(b.series().coefficient({-1, 0}) == cplx(kPi));
}

TEST_CASE("stored modes round trip through the mode list") {
  const auto modes = oracle::random_modes(11, 2, 3, 1.5);
  const MagneticField b = build_field(modes);
  const MagneticField again = build_field(b.series().list());
  CHECK(again.series().modes() == b.series().modes());
}

TEST_CASE("constant field has no periodic gauge part") {
  const std::vector<FourierMode> m{{{0, 0}, kTwoPi}};
  const MagneticField b = build_field(m);
  const GaugePotential g = build_gauge(b, {0.3, -0.2});
  CHECK(g.periodic_modes().empty());
  CHECK(curl_residual(g, b) <= 1e-10);
  const Vec2 a = g({0.25, 0.5});
  CHECK(a[0] == doctest::Approx(0.3 - kPi * 0.5));
  CHECK(a[1] == doctest::Approx(-0.2 + kPi * 0.25));
}

TEST_CASE("cosine field gives the sine vector potential") {
  const MagneticField b = cos_field(kTwoPi);
  const GaugePotential g = build_gauge(b, {0, 0});
  for (double x1 : {0.0, 0.1, 0.37, 0.5, 0.83})
    for (double x2 : {0.0, 0.6}) {
      const Vec2 p = g.periodic({x1, x2});
      CHECK(std::abs(p[0]) < 1e-13);
      CHECK(std::abs(p[1] - std::sin(kTwoPi * x1)) < 1e-13);
    }
}

TEST_CASE("curl residual on random fields") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const MagneticField b = build_field(oracle::random_modes(seed, int(seed % 3) + 1, 3, 2.0));
    const GaugePotential g = build_gauge(b, {0.1 * seed, -0.2});
    CHECK(curl_residual(g, b) <= 1e-10);
  }
}

TEST_CASE("gauge shift adds the gradient and keeps the curl") {
  const MagneticField b = cos_field(kTwoPi);
  const GaugePotential g = build_gauge(b, {0, 0});
  const std::vector<FourierMode> zero;
  const GaugePotential same = gauge_shift(g, RealFourierSeries(zero));
  CHECK(same.periodic_modes() == g.periodic_modes());

  const std::vector<FourierMode> c2{{{0, 1}, 0.5}, {{0, -1}, 0.5}};
  const GaugePotential s = gauge_shift(g, RealFourierSeries(c2));
  for (double x1 : {0.0, 0.3})
    for (double x2 : {0.1, 0.45, 0.9}) {
      const Vec2 d = s.periodic({x1, x2});
      const Vec2 o = g.periodic({x1, x2});
      CHECK(std::abs(d[0] - o[0]) < 1e-13);
      CHECK(std::abs(d[1] - o[1] + kTwoPi * std::sin(kTwoPi * x2)) < 1e-12);
    }

  const RealFourierSeries phi = oracle::random_periodic(7, 3, 0.8);
  const GaugePotential r = gauge_shift(g, phi);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      const Vec2 x{i / 12.0, j / 12.0};
      CHECK(std::abs(r.curl(x) - g.curl(x)) <= 1e-10);
    }
}

TEST_CASE("link integral matches quadrature of the potential") {
  const MagneticField b = build_field(oracle::random_modes(3, 1, 2, 1.0));
  const GaugePotential g = build_gauge(b, {0.4, 0.7});
  for (int d = 0; d < 2; ++d) {
    const Vec2 x{0.21, 0.64};
    const double len = 1.0 / 16;
    double acc = 0.0;
    const int m = 2000;
    for (int i = 0; i < m; ++i) {
      Vec2 p = x;
      p[d] += (i + 0.5) * len / m;
      acc += g(p)[d];
    }
    CHECK(std::abs(g.link_integral(x, d, len) - acc * len / m) < 1e-9);
  }
}

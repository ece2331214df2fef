#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace magque {

using cplx = std::complex<double>;
using Vec2 = std::array<double, 2>;
using IVec2 = std::array<int, 2>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

inline double wedge(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }
inline Vec2 perp(const Vec2& v) { return {-v[1], v[0]}; }
inline Vec2 to_vec(const IVec2& k) { return {double(k[0]), double(k[1])}; }
inline double knorm(const IVec2& k) { return std::hypot(double(k[0]), double(k[1])); }
inline int inorm_inf(const IVec2& k) { return std::max(std::abs(k[0]), std::abs(k[1])); }

// rotation e^{tJ} with J = [[0,1],[-1,0]]
inline Vec2 rotate_j(double t, const Vec2& v) {
  const double c = std::cos(t), s = std::sin(t);
  return {c * v[0] + s * v[1], -s * v[0] + c * v[1]};
}

class Error : public std::runtime_error {
 public:
  Error(const std::string& kind, const std::string& detail)
      : std::runtime_error(kind + ": " + detail), kind_(kind), detail_(detail) {}
  const std::string& kind() const { return kind_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string kind_;
  std::string detail_;
};

#define MAGQUE_ERROR(Name)                                              \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& detail) : Error(#Name, detail) {} \
  }

MAGQUE_ERROR(FluxNotQuantized);
MAGQUE_ERROR(NonRealField);
MAGQUE_ERROR(DirectionMismatch);
MAGQUE_ERROR(NonPositiveMeanFlux);
MAGQUE_ERROR(GridTooCoarse);
MAGQUE_ERROR(DimMismatch);
MAGQUE_ERROR(OriginMismatch);
MAGQUE_ERROR(NoConvergence);
MAGQUE_ERROR(ZeroVector);
MAGQUE_ERROR(IncommensurableShift);
MAGQUE_ERROR(GridTooCoarseForH);
MAGQUE_ERROR(SymbolRangeExceeded);
MAGQUE_ERROR(StepTooLarge);
MAGQUE_ERROR(ZeroField);
MAGQUE_ERROR(BadFlux);
MAGQUE_ERROR(ShellMismatch);
MAGQUE_ERROR(InsufficientSpan);
MAGQUE_ERROR(ParseError);
MAGQUE_ERROR(ValidationError);
MAGQUE_ERROR(FormatError);

#undef MAGQUE_ERROR

}  // namespace magque

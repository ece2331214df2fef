#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "magque/field_gauge.hpp"
#include "magque/quantization.hpp"

namespace magque {

// Config grammar, one entry per line:
//
//   [section.sub]            opens a table; later keys are prefixed with "section.sub."
//   key.path = value         bare keys use [A-Za-z0-9_-]
//   # comment                anywhere outside a string
//
// Values: "strings" with \" \\ \n escapes, true/false, numbers, and [arrays] that may nest and
// span lines. A number is a product/quotient of signed factors, each a decimal literal or pi:
// 2*pi, -pi/2, 0.5*pi*3.

struct ConfigValue {
  enum class Type { Number, String, Bool, Array };
  Type type = Type::Number;
  double number = 0.0;
  std::string text;
  bool flag = false;
  std::vector<ConfigValue> items;
  int line = 0;
};

/// Flat map from dotted key path to value.
struct ConfigDocument {
  std::map<std::string, ConfigValue> entries;
};

ConfigDocument parse_document(const std::string& text);

struct SymbolSpec {
  std::string kind = "position";  // position | shell | plateau | disk | gaussian_shell | gaussian
  std::vector<FourierMode> modes;
  double delta = 0.5;
  double r_in = 0.75;
  double r_out = 1.25;
  double width = 0.25;
  double r0 = 1.0;
  double s = 0.2;
  Vec2 center{1.0, 0.0};
  double xi_max = 2.0;
  bool operator==(const SymbolSpec&) const = default;
};

struct SolverConfig {
  int k = 6;
  std::optional<double> sigma;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  int block = 0;
  bool operator==(const SolverConfig&) const = default;
};

struct QuantizationConfig {
  int k_sym = 2;
  int j = 16;  // 0: chosen per symbol from its zeta tail
  double xi_max = 2.0;
  std::optional<double> h;  // defaults to 1/sqrt(lambda) of the chosen eigenfunction
  int index = 0;            // eigenfunction used by the ambiguity subcommand
  bool operator==(const QuantizationConfig&) const = default;
};

struct DiagnosticsConfig {
  int k = 4;
  std::vector<std::string> symbols;
  std::string source = "solver";  // solver | oracle
  std::vector<int> levels;
  double min_span = 8.0;
  bool operator==(const DiagnosticsConfig&) const = default;
};

struct ClassicalConfig {
  std::string kind = "magnetic";  // magnetic | cyclotron | geodesic | x_lambda
  Vec2 x0{0.0, 0.0};
  Vec2 xi0{1.0, 0.0};
  double t_end = 1.0;
  double dt = 1e-3;
  int stride = 10;
  IVec2 lattice{1, 0};
  int sign = 1;
  double s0 = 0.0;
  double eta0 = 0.0;
  bool operator==(const ClassicalConfig&) const = default;
};

struct ControlConfig {
  int density = 256;
  int samples = 0;  // 0 skips the classical control-time check
  Vec2 center{0.5, 0.5};
  double radius = 0.1;
  double t0 = 5.0;
  double r0 = 10.0;
  int bins = 10;
  bool operator==(const ControlConfig&) const = default;
};

struct OracleConfig {
  int levels = 5;
  double rel_tol = 1e-3;
  bool operator==(const OracleConfig&) const = default;
};

struct RunConfig {
  std::vector<FourierMode> field;
  Vec2 alpha{0.0, 0.0};
  std::vector<FourierMode> potential;
  int n = 64;
  SolverConfig solver;
  QuantizationConfig quantization;
  DiagnosticsConfig diagnostics;
  ClassicalConfig classical;
  ControlConfig control;
  OracleConfig oracle;
  std::map<std::string, SymbolSpec> symbols;
  std::string output_dir = "out";
  bool operator==(const RunConfig&) const = default;

  MagneticField magnetic_field() const;
  GaugePotential gauge() const;
  ScalarPotential scalar_potential() const;
  BandLimitedSymbol symbol(const std::string& name, double h) const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Canonical text form; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& cfg);

}  // namespace magque

#include "magque/config.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "magque/wavefunction_io.hpp"

namespace magque {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  ConfigDocument run() {
    ConfigDocument doc;
    std::string prefix;
    while (true) {
      skip_blank();
      if (at_end()) break;
      if (peek() == '\n') {
        advance();
        continue;
      }
      if (peek() == '#') {
        skip_comment();
        continue;
      }
      if (peek() == '[') {
        advance();
        skip_blank();
        prefix = key();
        skip_blank();
        expect(']');
        end_of_line();
        continue;
      }
      const int line = line_;
      std::string k = key();
      skip_blank();
      expect('=');
      skip_blank();
      ConfigValue v = value();
      v.line = line;
      end_of_line();
      const std::string full = prefix.empty() ? k : prefix + "." + k;
      if (doc.entries.count(full)) fail("duplicate key '" + full + "'", line);
      doc.entries.emplace(full, std::move(v));
    }
    return doc;
  }

 private:
  const std::string& s_;
  std::size_t p_ = 0;
  int line_ = 1;

  bool at_end() const { return p_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[p_]; }
  char advance() {
    const char c = s_[p_++];
    if (c == '\n') ++line_;
    return c;
  }

  [[noreturn]] void fail(const std::string& what, int line = 0) const {
    throw ParseError("line " + std::to_string(line ? line : line_) + ": " + what);
  }

  void skip_blank() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }
  void skip_comment() {
    while (!at_end() && peek() != '\n') advance();
  }
  // whitespace, newlines and comments inside arrays
  void skip_space() {
    while (!at_end()) {
      if (peek() == '#')
        skip_comment();
      else if (std::isspace(static_cast<unsigned char>(peek())))
        advance();
      else
        break;
    }
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'" + found());
    advance();
  }
  std::string found() const {
    if (at_end()) return " at end of input";
    if (peek() == '\n') return " at end of line";
    return std::string(", found '") + peek() + "'";
  }
  void end_of_line() {
    skip_blank();
    if (peek() == '#') skip_comment();
    if (at_end()) return;
    if (peek() != '\n') fail("unexpected trailing text" + found());
    advance();
  }

  static bool bare(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }
  std::string key() {
    std::string out;
    while (true) {
      std::string part;
      while (!at_end() && bare(peek())) part += advance();
      if (part.empty()) fail("expected a key" + found());
      out += part;
      skip_blank();
      if (peek() != '.') break;
      advance();
      skip_blank();
      out += '.';
    }
    return out;
  }

  ConfigValue value() {
    const char c = peek();
    if (c == '"') return string_value();
    if (c == '[') return array_value();
    if (std::isalpha(static_cast<unsigned char>(c)) && c != 'p') {
      std::string word;
      while (!at_end() && std::isalpha(static_cast<unsigned char>(peek()))) word += advance();
      ConfigValue v;
      v.type = ConfigValue::Type::Bool;
      if (word == "true")
        v.flag = true;
      else if (word != "false")
        fail("unknown literal '" + word + "'");
      return v;
    }
    ConfigValue v;
    v.number = number_expr();
    return v;
  }

  ConfigValue string_value() {
    advance();
    ConfigValue v;
    v.type = ConfigValue::Type::String;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = advance();
      if (c == '"') break;
      if (c == '\\') {
        if (at_end()) fail("unterminated string");
        const char e = advance();
        if (e == 'n')
          v.text += '\n';
        else if (e == '"' || e == '\\')
          v.text += e;
        else
          fail(std::string("unknown escape '\\") + e + "'");
      } else {
        v.text += c;
      }
    }
    return v;
  }

  ConfigValue array_value() {
    advance();
    ConfigValue v;
    v.type = ConfigValue::Type::Array;
    skip_space();
    while (peek() != ']') {
      if (at_end()) fail("unterminated array");
      const int line = line_;
      ConfigValue item = value();
      item.line = line;
      v.items.push_back(std::move(item));
      skip_space();
      if (peek() == ',') {
        advance();
        skip_space();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array" + found());
      }
    }
    advance();
    return v;
  }

  double factor() {
    skip_blank();
    double sign = 1.0;
    while (peek() == '-' || peek() == '+') {
      if (advance() == '-') sign = -sign;
      skip_blank();
    }
    if (s_.compare(p_, 2, "pi") == 0 && (p_ + 2 >= s_.size() || !bare(s_[p_ + 2]))) {
      p_ += 2;
      return sign * kPi;
    }
    const std::size_t start = p_;
    auto digits = [&] {
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
    };
    digits();
    if (peek() == '.') {
      advance();
      digits();
    }
    if (p_ == start || (p_ == start + 1 && s_[start] == '.')) fail("expected a number" + found());
    if (peek() == 'e' || peek() == 'E') {
      advance();
      if (peek() == '+' || peek() == '-') advance();
      const std::size_t e = p_;
      digits();
      if (p_ == e) fail("malformed exponent");
    }
    double x = 0.0;
    const auto r = std::from_chars(s_.data() + start, s_.data() + p_, x);
    if (r.ec != std::errc() || r.ptr != s_.data() + p_) fail("malformed number '" + s_.substr(start, p_ - start) + "'");
    return sign * x;
  }

  double number_expr() {
    double x = factor();
    while (true) {
      skip_blank();
      if (peek() == '*') {
        advance();
        x *= factor();
      } else if (peek() == '/') {
        advance();
        x /= factor();
      } else {
        break;
      }
    }
    if (!std::isfinite(x)) fail("number is not finite");
    return x;
  }
};

std::string where(const ConfigValue& v) { return " (line " + std::to_string(v.line) + ")"; }

class Reader {
 public:
  explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

  const ConfigValue* find(const std::string& key) {
    used_.insert(key);
    auto it = doc_.entries.find(key);
    return it == doc_.entries.end() ? nullptr : &it->second;
  }

  [[noreturn]] static void bad(const std::string& key, const std::string& what, const ConfigValue* v) {
    throw ValidationError(key + ": " + what + (v ? where(*v) : std::string()));
  }

  const ConfigValue& need(const std::string& key) {
    const ConfigValue* v = find(key);
    if (!v) bad(key, "missing required key", nullptr);
    return *v;
  }

  static double as_number(const std::string& key, const ConfigValue& v) {
    if (v.type != ConfigValue::Type::Number) bad(key, "expected a number", &v);
    return v.number;
  }
  static int as_int(const std::string& key, const ConfigValue& v) {
    const double x = as_number(key, v);
    if (x != std::round(x) || std::abs(x) > 2147483647.0) bad(key, "expected an integer", &v);
    return int(x);
  }

  void number(const std::string& key, double& out) {
    if (const ConfigValue* v = find(key)) out = as_number(key, *v);
  }
  void integer(const std::string& key, int& out) {
    if (const ConfigValue* v = find(key)) out = as_int(key, *v);
  }
  void text(const std::string& key, std::string& out) {
    if (const ConfigValue* v = find(key)) {
      if (v->type != ConfigValue::Type::String) bad(key, "expected a string", v);
      out = v->text;
    }
  }
  void vec2(const std::string& key, Vec2& out) {
    if (const ConfigValue* v = find(key)) {
      if (v->type != ConfigValue::Type::Array || v->items.size() != 2) bad(key, "expected [x, y]", v);
      out = {as_number(key, v->items[0]), as_number(key, v->items[1])};
    }
  }
  void ivec2(const std::string& key, IVec2& out) {
    if (const ConfigValue* v = find(key)) {
      if (v->type != ConfigValue::Type::Array || v->items.size() != 2) bad(key, "expected [k1, k2]", v);
      out = {as_int(key, v->items[0]), as_int(key, v->items[1])};
    }
  }
  void modes(const std::string& key, std::vector<FourierMode>& out) {
    if (const ConfigValue* v = find(key)) out = parse_modes(key, *v);
  }
  static std::vector<FourierMode> parse_modes(const std::string& key, const ConfigValue& v) {
    if (v.type != ConfigValue::Type::Array) bad(key, "expected [[k1, k2, re, im], ...]", &v);
    std::vector<FourierMode> out;
    for (const auto& m : v.items) {
      if (m.type != ConfigValue::Type::Array || (m.items.size() != 4 && m.items.size() != 3))
        bad(key, "each mode is [k1, k2, re, im]", &m);
      FourierMode f;
      f.k = {as_int(key, m.items[0]), as_int(key, m.items[1])};
      f.c = {as_number(key, m.items[2]), m.items.size() == 4 ? as_number(key, m.items[3]) : 0.0};
      out.push_back(f);
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [k, v] : doc_.entries)
      if (!used_.count(k)) bad(k, "unknown key", &v);
  }

  const ConfigDocument& doc() const { return doc_; }

 private:
  const ConfigDocument& doc_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& key, const std::string& what, Reader& r) {
  if (!ok) Reader::bad(key, what, r.find(key));
}

const std::set<std::string> kSymbolKinds{"position", "shell", "plateau", "disk", "gaussian_shell", "gaussian"};
const std::set<std::string> kClassicalKinds{"magnetic", "cyclotron", "geodesic", "x_lambda"};

}  // namespace

ConfigDocument parse_document(const std::string& text) { return Parser(text).run(); }

RunConfig parse_config(const std::string& text) {
  const ConfigDocument doc = parse_document(text);
  Reader r(doc);
  RunConfig c;

  const ConfigValue& fv = r.need("field.modes");
  c.field = Reader::parse_modes("field.modes", fv);
  r.vec2("gauge.alpha", c.alpha);
  r.modes("potential.modes", c.potential);
  r.integer("grid.n", c.n);

  Reader::as_number("solver.seed", r.need("solver.seed"));
  {
    const ConfigValue& sv = *r.find("solver.seed");
    if (sv.number < 0 || sv.number != std::round(sv.number) || sv.number > 9007199254740992.0)
      Reader::bad("solver.seed", "expected a non-negative integer", &sv);
    c.solver.seed = std::uint64_t(sv.number);
  }
  r.integer("solver.k", c.solver.k);
  r.number("solver.tol", c.solver.tol);
  r.integer("solver.block", c.solver.block);
  if (const ConfigValue* v = r.find("solver.sigma")) c.solver.sigma = Reader::as_number("solver.sigma", *v);

  r.integer("quantization.k_sym", c.quantization.k_sym);
  r.integer("quantization.j", c.quantization.j);
  r.number("quantization.xi_max", c.quantization.xi_max);
  r.integer("quantization.index", c.quantization.index);
  if (const ConfigValue* v = r.find("quantization.h")) c.quantization.h = Reader::as_number("quantization.h", *v);

  r.integer("diagnostics.k", c.diagnostics.k);
  r.text("diagnostics.source", c.diagnostics.source);
  r.number("diagnostics.min_span", c.diagnostics.min_span);
  if (const ConfigValue* v = r.find("diagnostics.symbols")) {
    if (v->type != ConfigValue::Type::Array) Reader::bad("diagnostics.symbols", "expected an array of names", v);
    for (const auto& it : v->items) {
      if (it.type != ConfigValue::Type::String) Reader::bad("diagnostics.symbols", "expected a string", &it);
      c.diagnostics.symbols.push_back(it.text);
    }
  }
  if (const ConfigValue* v = r.find("diagnostics.levels")) {
    if (v->type != ConfigValue::Type::Array) Reader::bad("diagnostics.levels", "expected an array of integers", v);
    for (const auto& it : v->items) c.diagnostics.levels.push_back(Reader::as_int("diagnostics.levels", it));
  }

  r.text("classical.kind", c.classical.kind);
  r.vec2("classical.x0", c.classical.x0);
  r.vec2("classical.xi0", c.classical.xi0);
  r.number("classical.t_end", c.classical.t_end);
  r.number("classical.dt", c.classical.dt);
  r.integer("classical.stride", c.classical.stride);
  r.ivec2("classical.lattice", c.classical.lattice);
  r.integer("classical.sign", c.classical.sign);
  r.number("classical.s0", c.classical.s0);
  r.number("classical.eta0", c.classical.eta0);

  r.integer("control.density", c.control.density);
  r.integer("control.samples", c.control.samples);
  r.vec2("control.center", c.control.center);
  r.number("control.radius", c.control.radius);
  r.number("control.t0", c.control.t0);
  r.number("control.r0", c.control.r0);
  r.integer("control.bins", c.control.bins);

  r.integer("oracle.levels", c.oracle.levels);
  r.number("oracle.rel_tol", c.oracle.rel_tol);

  r.text("output.dir", c.output_dir);

  for (const auto& [key, v] : doc.entries) {
    if (key.rfind("symbol.", 0) != 0) continue;
    const std::size_t dot = key.find('.', 7);
    if (dot == std::string::npos) Reader::bad(key, "expected symbol.NAME.field", &v);
    const std::string name = key.substr(7, dot - 7);
    if (c.symbols.count(name)) continue;
    const std::string p = "symbol." + name + ".";
    SymbolSpec s;
    r.text(p + "kind", s.kind);
    r.modes(p + "modes", s.modes);
    r.number(p + "delta", s.delta);
    r.number(p + "r_in", s.r_in);
    r.number(p + "r_out", s.r_out);
    r.number(p + "width", s.width);
    r.number(p + "r0", s.r0);
    r.number(p + "s", s.s);
    r.vec2(p + "center", s.center);
    r.number(p + "xi_max", s.xi_max);
    require(kSymbolKinds.count(s.kind) > 0, p + "kind", "unknown symbol kind '" + s.kind + "'", r);
    require(!s.modes.empty(), p + "modes", "a symbol needs at least one mode", r);
    require(s.delta > 0 && s.width > 0 && s.s > 0 && s.xi_max > 0 && s.r0 >= 0 && s.r_in >= 0 &&
                s.r_out >= s.r_in,
            p + "kind", "symbol parameters must be positive with r_in <= r_out", r);
    c.symbols.emplace(name, s);
  }

  r.reject_unknown();

  require(c.n >= 8 && c.n % 2 == 0, "grid.n", "must be even and at least 8", r);
  require(c.solver.k >= 1, "solver.k", "must be at least 1", r);
  require(c.solver.tol > 0, "solver.tol", "must be positive", r);
  require(c.solver.block >= 0, "solver.block", "must be non-negative", r);
  require(!c.solver.sigma || *c.solver.sigma >= 0, "solver.sigma", "must be non-negative", r);
  require(c.quantization.k_sym >= 0, "quantization.k_sym", "must be non-negative", r);
  require(c.quantization.j >= 0, "quantization.j", "must be non-negative (0 picks J from the symbol tail)", r);
  require(c.quantization.xi_max > 0, "quantization.xi_max", "must be positive", r);
  require(!c.quantization.h || *c.quantization.h > 0, "quantization.h", "must be positive", r);
  require(c.quantization.index >= 0, "quantization.index", "must be non-negative", r);
  require(c.diagnostics.k >= 1, "diagnostics.k", "must be at least 1", r);
  require(c.diagnostics.source == "solver" || c.diagnostics.source == "oracle", "diagnostics.source",
          "must be \"solver\" or \"oracle\"", r);
  require(c.diagnostics.min_span >= 1, "diagnostics.min_span", "must be at least 1", r);
  for (const auto& name : c.diagnostics.symbols)
    require(c.symbols.count(name) > 0, "diagnostics.symbols", "undeclared symbol '" + name + "'", r);
  for (int l : c.diagnostics.levels) require(l >= 1, "diagnostics.levels", "levels start at 1", r);
  require(kClassicalKinds.count(c.classical.kind) > 0, "classical.kind", "unknown kind '" + c.classical.kind + "'", r);
  require(c.classical.t_end >= 0, "classical.t_end", "must be non-negative", r);
  require(c.classical.dt > 0, "classical.dt", "must be positive", r);
  require(c.classical.stride >= 1, "classical.stride", "must be at least 1", r);
  require(c.classical.sign == 1 || c.classical.sign == -1, "classical.sign", "must be +1 or -1", r);
  require(c.classical.lattice != IVec2{0, 0}, "classical.lattice", "must be nonzero", r);
  require(c.control.density >= 2, "control.density", "must be at least 2", r);
  require(c.control.samples >= 0, "control.samples", "must be non-negative", r);
  require(c.control.radius > 0, "control.radius", "must be positive", r);
  require(c.control.t0 > 0, "control.t0", "must be positive", r);
  require(c.control.r0 > 0, "control.r0", "must be positive", r);
  require(c.control.bins >= 1, "control.bins", "must be at least 1", r);
  require(c.oracle.levels >= 1, "oracle.levels", "must be at least 1", r);
  require(c.oracle.rel_tol > 0, "oracle.rel_tol", "must be positive", r);
  require(!c.output_dir.empty(), "output.dir", "must not be empty", r);

  try {
    (void)c.magnetic_field();
  } catch (const FluxNotQuantized& e) {
    throw FluxNotQuantized("field.modes" + where(fv) + ": " + e.detail());
  } catch (const NonRealField& e) {
    throw NonRealField("field.modes" + where(fv) + ": " + e.detail());
  }
  try {
    (void)c.scalar_potential();
  } catch (const NonRealField& e) {
    throw NonRealField("potential.modes: " + e.detail());
  }
  return c;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

MagneticField RunConfig::magnetic_field() const { return build_field(field); }

GaugePotential RunConfig::gauge() const { return build_gauge(magnetic_field(), alpha); }

ScalarPotential RunConfig::scalar_potential() const { return ScalarPotential(potential); }

BandLimitedSymbol RunConfig::symbol(const std::string& name, double h) const {
  auto it = symbols.find(name);
  if (it == symbols.end()) throw ValidationError("symbol." + name + ": undeclared symbol");
  const SymbolSpec& s = it->second;
  if (s.kind == "position") return BandLimitedSymbol::position(s.modes, name);
  Profile base;
  double reach = s.xi_max;
  if (s.kind == "shell") {
    base = profiles::shell_cutoff(s.delta, h, alpha);
    reach = 1.0 + 0.5 * s.delta + h * norm(alpha);
  } else if (s.kind == "plateau") {
    base = profiles::radial_plateau(s.r_in, s.r_out, s.width);
    reach = s.r_out + s.width;
  } else if (s.kind == "disk") {
    base = profiles::disk(s.r0, s.width);
    reach = s.r0 + s.width;
  } else if (s.kind == "gaussian_shell") {
    base = profiles::gaussian_shell(s.r0, s.s, s.xi_max);
  } else {
    base = profiles::gaussian(s.center, s.s, s.xi_max);
  }
  std::map<IVec2, Profile> modes;
  for (const auto& m : s.modes) modes[m.k] = profiles::scaled(base, m.c);
  return BandLimitedSymbol::phase_space(std::move(modes), reach, name);
}

namespace {

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string vec(const Vec2& v) { return "[" + num(v[0]) + ", " + num(v[1]) + "]"; }

std::string mode_list(const std::vector<FourierMode>& modes) {
  std::string out = "[";
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    out += (i ? ", [" : "[") + std::to_string(m.k[0]) + ", " + std::to_string(m.k[1]) + ", " +
           num(m.c.real()) + ", " + num(m.c.imag()) + "]";
  }
  return out + "]";
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[field]\nmodes = " << mode_list(c.field) << "\n\n";
  os << "[gauge]\nalpha = " << vec(c.alpha) << "\n\n";
  os << "[potential]\nmodes = " << mode_list(c.potential) << "\n\n";
  os << "[grid]\nn = " << c.n << "\n\n";
  os << "[solver]\nk = " << c.solver.k << "\ntol = " << num(c.solver.tol) << "\nseed = " << c.solver.seed
     << "\nblock = " << c.solver.block << "\n";
  if (c.solver.sigma) os << "sigma = " << num(*c.solver.sigma) << "\n";
  os << "\n[quantization]\nk_sym = " << c.quantization.k_sym << "\nj = " << c.quantization.j
     << "\nxi_max = " << num(c.quantization.xi_max) << "\nindex = " << c.quantization.index << "\n";
  if (c.quantization.h) os << "h = " << num(*c.quantization.h) << "\n";
  os << "\n[diagnostics]\nk = " << c.diagnostics.k << "\nsource = " << quoted(c.diagnostics.source)
     << "\nmin_span = " << num(c.diagnostics.min_span) << "\nsymbols = [";
  for (std::size_t i = 0; i < c.diagnostics.symbols.size(); ++i)
    os << (i ? ", " : "") << quoted(c.diagnostics.symbols[i]);
  os << "]\nlevels = [";
  for (std::size_t i = 0; i < c.diagnostics.levels.size(); ++i) os << (i ? ", " : "") << c.diagnostics.levels[i];
  os << "]\n\n";
  const auto& k = c.classical;
  os << "[classical]\nkind = " << quoted(k.kind) << "\nx0 = " << vec(k.x0) << "\nxi0 = " << vec(k.xi0)
     << "\nt_end = " << num(k.t_end) << "\ndt = " << num(k.dt) << "\nstride = " << k.stride << "\nlattice = ["
     << k.lattice[0] << ", " << k.lattice[1] << "]\nsign = " << k.sign << "\ns0 = " << num(k.s0)
     << "\neta0 = " << num(k.eta0) << "\n\n";
  const auto& t = c.control;
  os << "[control]\ndensity = " << t.density << "\nsamples = " << t.samples << "\ncenter = " << vec(t.center)
     << "\nradius = " << num(t.radius) << "\nt0 = " << num(t.t0) << "\nr0 = " << num(t.r0)
     << "\nbins = " << t.bins << "\n\n";
  os << "[oracle]\nlevels = " << c.oracle.levels << "\nrel_tol = " << num(c.oracle.rel_tol) << "\n\n";
  os << "[output]\ndir = " << quoted(c.output_dir) << "\n";
  for (const auto& [name, s] : c.symbols) {
    os << "\n[symbol." << name << "]\nkind = " << quoted(s.kind) << "\nmodes = " << mode_list(s.modes)
       << "\ndelta = " << num(s.delta) << "\nr_in = " << num(s.r_in) << "\nr_out = " << num(s.r_out)
       << "\nwidth = " << num(s.width) << "\nr0 = " << num(s.r0) << "\ns = " << num(s.s)
       << "\ncenter = " << vec(s.center) << "\nxi_max = " << num(s.xi_max) << "\n";
  }
  return os.str();
}

}  // namespace magque

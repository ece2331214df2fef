#include <doctest.h>

#include <cmath>

#include "magque/config.hpp"

using namespace magque;

namespace {

std::string fixture(const std::string& name) { return std::string(MAGQUE_FIXTURES) + "/" + name; }

// Runs f and returns the message of the expected error type; fails the test on anything else.
template <class E, class F>
std::string message_of(F&& f) {
  try {
    f();
  } catch (const E& e) {
    return e.what();
  }
  FAIL("expected error not thrown");
  return {};
}

}  // namespace

TEST_CASE("minimal config") {
  const auto c = load_config(fixture("minimal.toml"));
  REQUIRE(c.field.size() == 1);
  CHECK(c.field[0].k == IVec2{0, 0});
  CHECK(c.field[0].c == cplx(kTwoPi));
  CHECK(c.solver.seed == 1);
  CHECK(c.n == 64);
  CHECK(c.solver.k == 6);
  CHECK(c.magnetic_field().flux() == 1);
  CHECK(c.output_dir == "out");
}

TEST_CASE("missing seed names the key") {
  const std::string msg = message_of<ValidationError>([] { load_config(fixture("missing_seed.toml")); });
  CHECK(msg.find("solver.seed") != std::string::npos);
}

TEST_CASE("unquantized flux is reported with its key path") {
  const std::string msg = message_of<FluxNotQuantized>([] { load_config(fixture("flux_violation.toml")); });
  CHECK(msg.find("field.modes") != std::string::npos);
  CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("parse errors carry line numbers") {
  const std::string a = message_of<ParseError>([] { parse_config("[field]\nmodes = [[0, 0, 1, 0]\n[solver]\n"); });
  CHECK(a.find("line") != std::string::npos);
  const std::string b = message_of<ParseError>([] { parse_config("# ok\n[solver]\nseed = 1\nseed = 2\n"); });
  CHECK(b.find("line 4") != std::string::npos);
  const std::string c = message_of<ParseError>([] { parse_config("[solver]\nseed = 1\n  k = = 3\n"); });
  CHECK(c.find("line 3") != std::string::npos);
  CHECK_THROWS_AS(parse_config("[field]\nname = \"unterminated\n"), ParseError);
}

TEST_CASE("validation errors name the key and line") {
  const std::string base = "[field]\nmodes = [[0, 0, 2*pi, 0]]\n[solver]\nseed = 1\n";
  const std::string a = message_of<ValidationError>([&] { parse_config(base + "[grid]\nn = 7\n"); });
  CHECK(a.find("grid.n") != std::string::npos);
  CHECK(a.find("line 6") != std::string::npos);
  const std::string b = message_of<ValidationError>([&] { parse_config(base + "bogus = 1\n"); });
  CHECK(b.find("solver.bogus") != std::string::npos);
  const std::string c = message_of<ValidationError>([&] { parse_config(base + "k = \"six\"\n"); });
  CHECK(c.find("solver.k") != std::string::npos);
  const std::string d = message_of<ValidationError>([&] {
    parse_config(base + "[diagnostics]\nsymbols = [\"nope\"]\n");
  });
  CHECK(d.find("diagnostics.symbols") != std::string::npos);
  CHECK_THROWS_AS(parse_config(base + "seed = -1\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[field]\nmodes = [[0, 0, 2*pi, 0]]\n[solver]\nseed = 1.5\n"), ValidationError);
}

TEST_CASE("number expressions") {
  const auto d = parse_document("a = 2*pi\nb = -pi/2\nc = 0.5*pi*3\nd = 1e-3\ne = [1, [2, 3],\n  4] # trailing\n");
  CHECK(d.entries.at("a").number == kTwoPi);
  CHECK(d.entries.at("b").number == -kPi / 2);
  CHECK(d.entries.at("c").number == doctest::Approx(1.5 * kPi).epsilon(1e-15));
  CHECK(d.entries.at("d").number == 1e-3);
  CHECK(d.entries.at("e").items.size() == 3);
  CHECK(d.entries.at("e").items[1].items[1].number == 3.0);
  CHECK(d.entries.at("e").line == 5);
}

TEST_CASE("format and parse round trip") {
  for (const char* name : {"minimal.toml", "landau_oracle.toml", "control_pass.toml", "classical.toml", "scan.toml"}) {
    const auto c = load_config(fixture(name));
    const std::string text = format_config(c);
    CHECK(parse_config(text) == c);
    CHECK(format_config(parse_config(text)) == text);
  }
  auto c = load_config(fixture("scan.toml"));
  c.solver.sigma = 0.1 + 0.2;
  c.quantization.h = 1.0 / 3.0;
  c.alpha = {std::sqrt(2.0), -1e-300};
  CHECK(parse_config(format_config(c)) == c);
}

TEST_CASE("symbols from the config") {
  const auto c = load_config(fixture("scan.toml"));
  const auto s = c.symbol("cos1", 0.1);
  CHECK(s.xi_independent());
  CHECK(s.constant({1, 0}) == cplx(0.5));
  CHECK_THROWS_AS(c.symbol("missing", 0.1), ValidationError);
  const auto t = parse_config(
      "[field]\nmodes = [[0, 0, 2*pi, 0]]\n[solver]\nseed = 1\n"
      "[symbol.ring]\nkind = \"shell\"\nmodes = [[0, 0, 1, 0]]\ndelta = 0.5\n");
  const auto ring = t.symbol("ring", 0.1);
  CHECK_FALSE(ring.xi_independent());
  CHECK(std::abs(ring.mode({0, 0}, {1.0, 0.0}) - 1.0) < 1e-12);
  CHECK(std::abs(ring.mode({0, 0}, {0.2, 0.0})) < 1e-12);
}

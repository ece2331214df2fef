#include <doctest.h>

#include <filesystem>

#include "magque/wavefunction_io.hpp"

using namespace magque;

TEST_CASE("binary wavefunction round trip") {
  const auto u = random_wavefunction(12, -3, 8, {1, -2});
  const std::string bytes = encode_wavefunction(u);
  CHECK(bytes.substr(0, 4) == "MTWF");
  CHECK(bytes.size() == 24 + 12 * 12 * 16);
  const auto v = decode_wavefunction(bytes);
  CHECK(v.n() == 12);
  CHECK(v.flux() == -3);
  CHECK(v.origin() == IVec2{1, -2});
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(u.values()[i] == v.values()[i]);
}

TEST_CASE("malformed wavefunction files") {
  const std::string good = encode_wavefunction(random_wavefunction(4, 1, 1));
  CHECK_THROWS_AS(decode_wavefunction("MTW"), FormatError);
  CHECK_THROWS_AS(decode_wavefunction("XXXX" + good.substr(4)), FormatError);
  CHECK_THROWS_AS(decode_wavefunction(good.substr(0, good.size() - 1)), FormatError);
  CHECK_THROWS_AS(decode_wavefunction(good + "x"), FormatError);
  std::string bad_version = good;
  bad_version[12] = 2;
  CHECK_THROWS_AS(decode_wavefunction(bad_version), FormatError);
}

TEST_CASE("files are written atomically and read back") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "magque_io_test";
  fs::remove_all(dir);
  const auto u = random_wavefunction(8, 2, 3);
  const std::string path = (dir / "sub" / "u.mtwf").string();
  write_wavefunction(path, u);
  const auto v = read_wavefunction(path);
  CHECK((u - v).norm() == 0.0);
  for (const auto& e : fs::directory_iterator(dir / "sub")) CHECK(e.path().filename() == "u.mtwf");
  CHECK_THROWS_AS(read_wavefunction((dir / "none.mtwf").string()), FormatError);
  const std::string csv = wavefunction_csv(u);
  CHECK(csv.rfind("j1,j2,re,im\n", 0) == 0);
  fs::remove_all(dir);
}

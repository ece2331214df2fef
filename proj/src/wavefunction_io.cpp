#include "magque/wavefunction_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <unistd.h>

namespace magque {

namespace {

constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeader = 24;

void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& s, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& s, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(s[at + i])) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::string& s, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(s[at + i])) << (8 * i);
  return v;
}

}  // namespace

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw FormatError("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string encode_wavefunction(const GridWavefunction& u) {
  std::string s = "MTWF";
  put_u32(s, std::uint32_t(u.n()));
  put_u32(s, static_cast<std::uint32_t>(u.flux()));
  put_u32(s, kVersion);
  put_u32(s, static_cast<std::uint32_t>(u.origin()[0]));
  put_u32(s, static_cast<std::uint32_t>(u.origin()[1]));
  s.reserve(kHeader + 16 * u.size());
  for (const auto& v : u.values()) {
    put_u64(s, std::bit_cast<std::uint64_t>(v.real()));
    put_u64(s, std::bit_cast<std::uint64_t>(v.imag()));
  }
  return s;
}

GridWavefunction decode_wavefunction(const std::string& bytes) {
  if (bytes.size() < kHeader || bytes.compare(0, 4, "MTWF") != 0)
    throw FormatError("missing MTWF header");
  const std::uint32_t n = get_u32(bytes, 4);
  const auto flux = static_cast<std::int32_t>(get_u32(bytes, 8));
  const std::uint32_t version = get_u32(bytes, 12);
  if (version != kVersion) throw FormatError("unsupported version " + std::to_string(version));
  const IVec2 origin{static_cast<std::int32_t>(get_u32(bytes, 16)),
                     static_cast<std::int32_t>(get_u32(bytes, 20))};
  if (n == 0 || n > 65536) throw FormatError("implausible grid size");
  const std::size_t count = std::size_t(n) * n;
  if (bytes.size() != kHeader + 16 * count) throw FormatError("payload size does not match N");
  GridWavefunction u(int(n), flux, origin);
  for (std::size_t i = 0; i < count; ++i) {
    const double re = std::bit_cast<double>(get_u64(bytes, kHeader + 16 * i));
    const double im = std::bit_cast<double>(get_u64(bytes, kHeader + 16 * i + 8));
    u.values()[i] = {re, im};
  }
  return u;
}

void write_wavefunction(const std::string& path, const GridWavefunction& u) {
  atomic_write(path, encode_wavefunction(u));
}

GridWavefunction read_wavefunction(const std::string& path) { return decode_wavefunction(read_file(path)); }

std::string wavefunction_csv(const GridWavefunction& u) {
  std::ostringstream os;
  os << std::setprecision(17) << "j1,j2,re,im\n";
  for (int j1 = 0; j1 < u.n(); ++j1)
    for (int j2 = 0; j2 < u.n(); ++j2)
      os << j1 << ',' << j2 << ',' << u(j1, j2).real() << ',' << u(j1, j2).imag() << '\n';
  return os.str();
}

}  // namespace magque

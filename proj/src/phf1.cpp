#include "polyheat/phf1.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace polyheat {
namespace {

template <class T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  is.read(reinterpret_cast<char*>(bytes), sizeof(T));
  require(bool(is), ErrorKind::io, "PHF1: truncated header or payload");
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void write_header(std::ostream& os, const GridSpec& g, double t, std::uint8_t kind) {
  os.write("PHF1", 4);
  put_le<std::uint32_t>(os, std::uint32_t(g.dim));
  put_le<std::uint32_t>(os, std::uint32_t(g.points));
  put_le<double>(os, g.half_width);
  put_le<double>(os, t);
  put_le<std::uint8_t>(os, kind);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  require(bool(os), ErrorKind::io, "cannot open " + path.string() + " for writing");
  return os;
}

} // namespace

void write_phf1(std::ostream& os, const Field& u) {
  write_header(os, u.grid, u.time, 0);
  for (double v : u.values) put_le<double>(os, v);
}

void write_phf1(std::ostream& os, const VectorField& v, double t) {
  write_header(os, v.grid, t, 1);
  for (const auto& c : v.components)
    for (double x : c) put_le<double>(os, x);
}

void write_phf1(const std::filesystem::path& path, const Field& u) {
  auto os = open_out(path);
  write_phf1(os, u);
}

void write_phf1(const std::filesystem::path& path, const VectorField& v, double t) {
  auto os = open_out(path);
  write_phf1(os, v, t);
}

Snapshot read_phf1(std::istream& is) {
  char magic[4] = {};
  is.read(magic, 4);
  require(bool(is) && std::memcmp(magic, "PHF1", 4) == 0, ErrorKind::io, "PHF1: bad magic");
  const auto dim = get_le<std::uint32_t>(is);
  const auto points = get_le<std::uint32_t>(is);
  const double half_width = get_le<double>(is);
  const double t = get_le<double>(is);
  const auto kind = get_le<std::uint8_t>(is);
  require(kind <= 1, ErrorKind::io, "PHF1: unknown payload kind");
  require(points <= (1u << 16), ErrorKind::io, "PHF1: implausible size");
  GridSpec grid;
  try {
    grid = make_grid(int(dim), half_width, int(points));
  } catch (const Error& e) {
    fail(ErrorKind::io, std::string("PHF1: invalid grid header: ") + e.what());
  }
  auto read_block = [&](std::vector<double>& out) {
    for (double& v : out) v = get_le<double>(is);
  };
  Snapshot result;
  if (kind == 0) {
    Field u(grid, t);
    read_block(u.values);
    result = std::move(u);
  } else {
    VectorField v(grid);
    for (auto& c : v.components) read_block(c);
    result = std::move(v);
  }
  is.peek();
  require(is.eof(), ErrorKind::io, "PHF1: trailing bytes after payload");
  return result;
}

Snapshot read_phf1(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(bool(is), ErrorKind::io, "cannot open " + path.string());
  return read_phf1(is);
}

} // namespace polyheat

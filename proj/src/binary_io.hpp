// Little-endian POD read/write helpers shared by the binary file formats.
#ifndef CITETIME_SRC_BINARY_IO_HPP
#define CITETIME_SRC_BINARY_IO_HPP

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "citetime/common.hpp"

namespace citetime::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in, const std::string& what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw DataError("truncated file while reading " + what);
  return v;
}

inline void put_reals(std::ostream& out, const Real* p, std::size_t n) {
  out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(Real)));
}

inline void get_reals(std::istream& in, Real* p, std::size_t n, const std::string& what) {
  if (!in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(Real))))
    throw DataError("truncated file while reading " + what);
}

inline void expect_magic(std::istream& in, const char (&magic)[9], const std::string& path) {
  char buf[8];
  if (!in.read(buf, 8) || std::memcmp(buf, magic, 8) != 0)
    throw DataError(path + ": bad magic, not a " + std::string(magic, 8) + " file");
}

}  // namespace citetime::io

#endif  // CITETIME_SRC_BINARY_IO_HPP

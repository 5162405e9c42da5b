#ifndef SPIX_TENSOR_IO_HPP
#define SPIX_TENSOR_IO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "spix/error.hpp"
#include "spix/image.hpp"

namespace spix {

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "file readers assume a little-endian host");

inline void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

inline std::uint32_t read_u32(std::istream& in, const std::string& path) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  if (in.gcount() != 4) fail(errc::truncated_data, path + ": unexpected end of file");
  return v;
}

inline void read_exact(std::istream& in, void* dst, std::size_t bytes, const std::string& path) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes)
    fail(errc::truncated_data, path + ": unexpected end of file");
}

inline void check_magic(std::istream& in, const char expect[4], const std::string& path) {
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, expect, 4) != 0)
    fail(errc::bad_magic, path + ": bad magic, expected " + std::string(expect, 4));
}

}  // namespace detail

inline constexpr std::uint32_t kFtenVersion = 1;
inline constexpr std::uint32_t kSpxlVersion = 1;

/// FTEN: "FTEN", u32 version, W, H, M, then W*H*M float32 LE, map-planar.
inline void write_feature_file(const std::string& path, const FeatureTensor& t) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot open " + path + " for writing");
  out.write("FTEN", 4);
  detail::write_u32(out, kFtenVersion);
  detail::write_u32(out, static_cast<std::uint32_t>(t.width));
  detail::write_u32(out, static_cast<std::uint32_t>(t.height));
  detail::write_u32(out, static_cast<std::uint32_t>(t.maps));
  out.write(reinterpret_cast<const char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * 4));
  require(out.good(), errc::io_error, "write failed for " + path);
}

inline FeatureTensor read_feature_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path);
  detail::check_magic(in, "FTEN", path);
  const auto version = detail::read_u32(in, path);
  if (version != kFtenVersion)
    fail(errc::version_mismatch, path + ": FTEN version " + std::to_string(version));
  FeatureTensor t;
  t.width = static_cast<int>(detail::read_u32(in, path));
  t.height = static_cast<int>(detail::read_u32(in, path));
  t.maps = static_cast<int>(detail::read_u32(in, path));
  t.data.resize(static_cast<std::size_t>(t.width) * t.height * t.maps);
  detail::read_exact(in, t.data.data(), t.data.size() * 4, path);
  return t;
}

/// SPXL: "SPXL", u32 version, W, H, then W*H u32 LE labels row-major.
inline void write_labelmap(const std::string& path, const SuperpixelMap& map) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot open " + path + " for writing");
  out.write("SPXL", 4);
  detail::write_u32(out, kSpxlVersion);
  detail::write_u32(out, static_cast<std::uint32_t>(map.width));
  detail::write_u32(out, static_cast<std::uint32_t>(map.height));
  out.write(reinterpret_cast<const char*>(map.labels.data()),
            static_cast<std::streamsize>(map.labels.size() * 4));
  require(out.good(), errc::io_error, "write failed for " + path);
}

inline SuperpixelMap read_labelmap(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path);
  detail::check_magic(in, "SPXL", path);
  const auto version = detail::read_u32(in, path);
  if (version != kSpxlVersion)
    fail(errc::version_mismatch, path + ": SPXL version " + std::to_string(version));
  SuperpixelMap map;
  map.width = static_cast<int>(detail::read_u32(in, path));
  map.height = static_cast<int>(detail::read_u32(in, path));
  map.labels.resize(static_cast<std::size_t>(map.width) * map.height);
  detail::read_exact(in, map.labels.data(), map.labels.size() * 4, path);
  return map;
}

}  // namespace spix

#endif  // SPIX_TENSOR_IO_HPP

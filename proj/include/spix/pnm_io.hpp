#ifndef SPIX_PNM_IO_HPP
#define SPIX_PNM_IO_HPP

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "spix/error.hpp"
#include "spix/image.hpp"

namespace spix {

namespace detail {

struct PnmHeader {
  char type = 0;  // '5' or '6'
  int width = 0;
  int height = 0;
  int maxval = 0;
};

// Reads magic, dims and maxval, skipping whitespace and '#' comments.
inline PnmHeader read_pnm_header(std::istream& in, const std::string& path) {
  PnmHeader h;
  char p = 0;
  in.get(p);
  in.get(h.type);
  if (!in || p != 'P' || (h.type != '5' && h.type != '6'))
    fail(errc::malformed_header, path + ": not a binary PGM/PPM file");

  int fields[3];
  for (int& f : fields) {
    int c = in.peek();
    while (in && (std::isspace(c) || c == '#')) {
      if (c == '#') in.ignore(1 << 20, '\n');
      else in.ignore(1);
      c = in.peek();
    }
    if (!(in >> f)) fail(errc::malformed_header, path + ": bad PNM header field");
  }
  in.ignore(1);  // single whitespace before the raster
  h.width = fields[0];
  h.height = fields[1];
  h.maxval = fields[2];
  if (h.width < 1 || h.height < 1 || h.maxval < 1 || h.maxval > 65535)
    fail(errc::malformed_header, path + ": bad PNM dimensions or maxval");
  return h;
}

inline void write_pnm_header(std::ostream& out, char type, int w, int h, int maxval) {
  out << 'P' << type << '\n' << w << ' ' << h << '\n' << maxval << '\n';
}

}  // namespace detail

/// Loads an 8-bit binary PGM (P5) or PPM (P6).
inline RawImage load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path);
  const auto h = detail::read_pnm_header(in, path);
  if (h.maxval > 255) fail(errc::unsupported_depth, path + ": 16-bit samples not supported here");

  RawImage img;
  img.width = h.width;
  img.height = h.height;
  img.channels = h.type == '5' ? 1 : 3;
  img.data.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
  in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.data.size())
    fail(errc::truncated_data, path + ": raster shorter than the header claims");
  return img;
}

inline void save_image(const std::string& path, const RawImage& img) {
  require(img.channels == 1 || img.channels == 3, errc::wrong_channel_count,
          "save_image supports 1 or 3 channels");
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot open " + path + " for writing");
  detail::write_pnm_header(out, img.channels == 1 ? '5' : '6', img.width, img.height, 255);
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
  require(out.good(), errc::io_error, "write failed for " + path);
}

/// Label-map export as 16-bit PGM (maxval 65535, big-endian samples).
inline void write_labelmap_pgm(const std::string& path, const SuperpixelMap& map) {
  for (std::uint32_t v : map.labels)
    if (v > 65535)
      fail(errc::label_overflow, "label " + std::to_string(v) + " does not fit 16-bit PGM");
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot open " + path + " for writing");
  detail::write_pnm_header(out, '5', map.width, map.height, 65535);
  std::vector<std::uint8_t> buf(map.labels.size() * 2);
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    buf[2 * i] = static_cast<std::uint8_t>(map.labels[i] >> 8);
    buf[2 * i + 1] = static_cast<std::uint8_t>(map.labels[i] & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  require(out.good(), errc::io_error, "write failed for " + path);
}

/// Reads an 8- or 16-bit PGM into a label map (ground-truth ingestion path).
inline SuperpixelMap read_labelmap_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path);
  const auto h = detail::read_pnm_header(in, path);
  if (h.type != '5') fail(errc::malformed_header, path + ": label maps must be PGM");

  SuperpixelMap map(h.width, h.height);
  const int bytes_per = h.maxval > 255 ? 2 : 1;
  std::vector<std::uint8_t> buf(map.labels.size() * bytes_per);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size())
    fail(errc::truncated_data, path + ": raster shorter than the header claims");
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    map.labels[i] = bytes_per == 2
                        ? (static_cast<std::uint32_t>(buf[2 * i]) << 8) | buf[2 * i + 1]
                        : buf[i];
  }
  return map;
}

}  // namespace spix

#endif  // SPIX_PNM_IO_HPP

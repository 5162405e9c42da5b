#ifndef SPIX_IMAGE_HPP
#define SPIX_IMAGE_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "spix/error.hpp"

namespace spix {

/// 8-bit image as read from a PGM/PPM file: row-major, channel-interleaved.
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 = gray, 3 = RGB
  std::vector<std::uint8_t> data;

  std::uint8_t at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

/// Real-valued multi-channel image, channel-planar. Lab channels, when
/// present, are named "L","a","b" and come first.
struct MultiChannelImage {
  int width = 0;
  int height = 0;
  std::vector<std::string> channel_names;
  std::vector<float> data;  // channel-planar, row-major per plane

  int channels() const { return static_cast<int>(channel_names.size()); }

  std::size_t plane_size() const { return static_cast<std::size_t>(width) * height; }

  float* plane(int c) { return data.data() + plane_size() * c; }
  const float* plane(int c) const { return data.data() + plane_size() * c; }

  float& at(int x, int y, int c) {
    return data[plane_size() * c + static_cast<std::size_t>(y) * width + x];
  }
  float at(int x, int y, int c) const {
    return data[plane_size() * c + static_cast<std::size_t>(y) * width + x];
  }

  /// All channel values of one pixel, gathered across planes.
  std::vector<float> pixel(int x, int y) const {
    std::vector<float> v(channel_names.size());
    for (int c = 0; c < channels(); ++c) v[c] = at(x, y, c);
    return v;
  }
};

/// Stack of M feature maps sharing one spatial grid, map-planar.
struct FeatureTensor {
  int width = 0;
  int height = 0;
  int maps = 0;
  std::vector<float> data;  // map-planar, row-major per map

  std::size_t plane_size() const { return static_cast<std::size_t>(width) * height; }

  float* plane(int m) { return data.data() + plane_size() * m; }
  const float* plane(int m) const { return data.data() + plane_size() * m; }

  float& at(int x, int y, int m) {
    return data[plane_size() * m + static_cast<std::size_t>(y) * width + x];
  }
  float at(int x, int y, int m) const {
    return data[plane_size() * m + static_cast<std::size_t>(y) * width + x];
  }
};

/// Integer label map. Used both for superpixel output and for ground-truth
/// segmentations.
struct SuperpixelMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> labels;  // row-major

  SuperpixelMap() = default;
  SuperpixelMap(int w, int h, std::uint32_t fill = 0)
      : width(w), height(h), labels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint32_t& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }
  std::uint32_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }

  bool same_dims(const SuperpixelMap& o) const { return width == o.width && height == o.height; }
};

/// Marks pixels with any 4-neighbor carrying a different label. The image
/// border alone does not make a pixel a boundary.
inline std::vector<bool> boundary_pixels(const SuperpixelMap& seg) {
  const int w = seg.width, h = seg.height;
  std::vector<bool> edge(static_cast<std::size_t>(w) * h, false);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::uint32_t l = seg.at(x, y);
      if ((x > 0 && seg.at(x - 1, y) != l) || (x + 1 < w && seg.at(x + 1, y) != l) ||
          (y > 0 && seg.at(x, y - 1) != l) || (y + 1 < h && seg.at(x, y + 1) != l))
        edge[static_cast<std::size_t>(y) * w + x] = true;
    }
  return edge;
}

namespace detail {

inline double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
  constexpr double kCube = 216.0 / 24389.0;  // (6/29)^3
  constexpr double kSlope = 24389.0 / 27.0;  // (29/6)^2 * 3 ... used as (kSlope*t + 16)/116
  return t > kCube ? std::cbrt(t) : (kSlope * t + 16.0) / 116.0;
}

}  // namespace detail

/// sRGB -> linear RGB -> XYZ (D65) -> CIELAB, L in [0,100].
inline MultiChannelImage rgb_to_lab(const RawImage& img) {
  require(img.channels == 3, errc::wrong_channel_count,
          "rgb_to_lab needs a 3-channel image, got " + std::to_string(img.channels));

  // White point taken as the row sums so that gray pixels land on a = b = 0
  // exactly, independent of rounding in the matrix constants.
  constexpr double m[3][3] = {{0.4124564, 0.3575761, 0.1804375},
                              {0.2126729, 0.7151522, 0.0721750},
                              {0.0193339, 0.1191920, 0.9503041}};
  constexpr double xn = m[0][0] + m[0][1] + m[0][2];
  constexpr double yn = m[1][0] + m[1][1] + m[1][2];
  constexpr double zn = m[2][0] + m[2][1] + m[2][2];

  MultiChannelImage out;
  out.width = img.width;
  out.height = img.height;
  out.channel_names = {"L", "a", "b"};
  out.data.resize(out.plane_size() * 3);

  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double r = detail::srgb_to_linear(img.at(x, y, 0) / 255.0);
      const double g = detail::srgb_to_linear(img.at(x, y, 1) / 255.0);
      const double b = detail::srgb_to_linear(img.at(x, y, 2) / 255.0);
      const double fx = detail::lab_f((m[0][0] * r + m[0][1] * g + m[0][2] * b) / xn);
      const double fy = detail::lab_f((m[1][0] * r + m[1][1] * g + m[1][2] * b) / yn);
      const double fz = detail::lab_f((m[2][0] * r + m[2][1] * g + m[2][2] * b) / zn);
      out.at(x, y, 0) = static_cast<float>(116.0 * fy - 16.0);
      out.at(x, y, 1) = static_cast<float>(500.0 * (fx - fy));
      out.at(x, y, 2) = static_cast<float>(200.0 * (fy - fz));
    }
  }
  return out;
}

/// Gray image as a single-channel "L"-style plane scaled to [0,100].
inline MultiChannelImage gray_to_multichannel(const RawImage& img) {
  require(img.channels == 1, errc::wrong_channel_count,
          "gray_to_multichannel needs a 1-channel image");
  MultiChannelImage out;
  out.width = img.width;
  out.height = img.height;
  out.channel_names = {"L"};
  out.data.resize(out.plane_size());
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      out.at(x, y, 0) = static_cast<float>(img.at(x, y, 0) * (100.0 / 255.0));
  return out;
}

/// Nearest-neighbor upscaling per map; target pixel (x,y) reads source
/// (x*sw/tw, y*sh/th) truncated.
inline FeatureTensor upscale_nearest(const FeatureTensor& t, int target_w, int target_h) {
  require(target_w >= t.width && target_h >= t.height, errc::downscale,
          "upscale_nearest target must not be smaller than the source");
  if (target_w == t.width && target_h == t.height) return t;

  FeatureTensor out;
  out.width = target_w;
  out.height = target_h;
  out.maps = t.maps;
  out.data.resize(out.plane_size() * t.maps);
  for (int m = 0; m < t.maps; ++m) {
    const float* src = t.plane(m);
    float* dst = out.plane(m);
    for (int y = 0; y < target_h; ++y) {
      const int sy = static_cast<int>(static_cast<std::int64_t>(y) * t.height / target_h);
      for (int x = 0; x < target_w; ++x) {
        const int sx = static_cast<int>(static_cast<std::int64_t>(x) * t.width / target_w);
        dst[static_cast<std::size_t>(y) * target_w + x] =
            src[static_cast<std::size_t>(sy) * t.width + sx];
      }
    }
  }
  return out;
}

/// Appends the mask-selected maps of `t` to `img` as channels named
/// "f<map index>".
inline MultiChannelImage concat_channels(const MultiChannelImage& img, const FeatureTensor& t,
                                         const std::vector<bool>& mask) {
  require(t.width == img.width && t.height == img.height, errc::shape_mismatch,
          "feature tensor dims do not match the image");
  require(static_cast<int>(mask.size()) == t.maps, errc::shape_mismatch,
          "mask length does not match the map count");

  MultiChannelImage out = img;
  for (int m = 0; m < t.maps; ++m) {
    if (!mask[m]) continue;
    out.channel_names.push_back("f" + std::to_string(m));
    out.data.insert(out.data.end(), t.plane(m), t.plane(m) + t.plane_size());
  }
  return out;
}

}  // namespace spix

#endif  // SPIX_IMAGE_HPP

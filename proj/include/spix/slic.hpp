#ifndef SPIX_SLIC_HPP
#define SPIX_SLIC_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <vector>

#include "spix/error.hpp"
#include "spix/image.hpp"
#include "spix/threading.hpp"

namespace spix {

inline constexpr std::uint32_t kNoLabel = std::numeric_limits<std::uint32_t>::max();

struct SlicParams {
  int step_size = 16;         // grid step S, the nominal superpixel side
  double compactness = 10.0;  // sigma
  int iterations = 5;
  std::array<double, 3> alpha = {1.0, 1.0, 1.0};
  std::vector<double> beta;  // one weight per extra feature channel
  double min_component_frac = 0.25;
  bool perturb_seeds = false;
  int threads = 1;
};

struct ClusterCenter {
  double x = 0.0;
  double y = 0.0;
  std::vector<double> features;  // length = image channel count
  std::int64_t pixel_count = 0;
};

namespace detail {

inline void validate_slic(const SlicParams& p, int channels) {
  require(p.step_size >= 2, errc::bad_dims, "step size must be >= 2");
  require(p.compactness > 0.0, errc::bad_dims, "compactness must be > 0");
  require(p.iterations >= 1, errc::bad_dims, "iterations must be >= 1");
  require(channels == 3 + static_cast<int>(p.beta.size()), errc::length_mismatch,
          "image has " + std::to_string(channels) + " channels but weights cover " +
              std::to_string(3 + p.beta.size()));
  double total = 0.0;
  for (double a : p.alpha) {
    require(a >= 0.0, errc::bad_dims, "alpha weights must be >= 0");
    total += a;
  }
  for (double b : p.beta) {
    require(b >= 0.0, errc::bad_dims, "beta weights must be >= 0");
    total += b;
  }
  require(total > 0.0, errc::bad_dims, "at least one weight must be > 0");
}

// squared gradient magnitude summed over channels, used for seed perturbation
inline double pixel_gradient_sq(const MultiChannelImage& img, int x, int y) {
  const int xl = std::max(0, x - 1), xr = std::min(img.width - 1, x + 1);
  const int yu = std::max(0, y - 1), yd = std::min(img.height - 1, y + 1);
  double g = 0.0;
  for (int c = 0; c < img.channels(); ++c) {
    const double dx = img.at(xr, y, c) - img.at(xl, y, c);
    const double dy = img.at(x, yd, c) - img.at(x, yu, c);
    g += dx * dx + dy * dy;
  }
  return g;
}

}  // namespace detail

/// Weighted squared feature distance: the three leading channels use alpha,
/// the rest use beta.
inline double color_distance_sq(const std::vector<double>& pixel_features,
                                const std::vector<double>& cluster_features,
                                const std::array<double, 3>& alpha,
                                const std::vector<double>& beta) {
  require(pixel_features.size() == cluster_features.size(), errc::length_mismatch,
          "feature vectors differ in length");
  require(pixel_features.size() == 3 + beta.size(), errc::length_mismatch,
          "weights do not cover the feature vectors");
  double d = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double diff = pixel_features[c] - cluster_features[c];
    d += alpha[c] * diff * diff;
  }
  for (std::size_t m = 0; m < beta.size(); ++m) {
    const double diff = pixel_features[3 + m] - cluster_features[3 + m];
    d += beta[m] * diff * diff;
  }
  return d;
}

namespace detail {

// same arithmetic as color_distance_sq, reading the pixel straight from the
// planar image to avoid a gather per candidate
inline double color_distance_sq_at(const MultiChannelImage& img, int x, int y,
                                   const ClusterCenter& c, const SlicParams& p) {
  const std::size_t pix = static_cast<std::size_t>(y) * img.width + x;
  const std::size_t plane = img.plane_size();
  double d = 0.0;
  for (int ch = 0; ch < 3; ++ch) {
    const double diff = img.data[plane * ch + pix] - c.features[ch];
    d += p.alpha[ch] * diff * diff;
  }
  for (std::size_t m = 0; m < p.beta.size(); ++m) {
    const double diff = img.data[plane * (3 + m) + pix] - c.features[3 + m];
    d += p.beta[m] * diff * diff;
  }
  return d;
}

inline double spatial_scale_sq(const SlicParams& p) {
  const double s = p.compactness / p.step_size;
  return s * s;
}

}  // namespace detail

/// Combined squared distance: feature term plus (sigma/S)^2-scaled spatial term.
inline double total_distance_sq(const MultiChannelImage& img, int x, int y,
                                const ClusterCenter& c, const SlicParams& p) {
  const double dx = x - c.x;
  const double dy = y - c.y;
  return detail::color_distance_sq_at(img, x, y, c, p) +
         detail::spatial_scale_sq(p) * (dx * dx + dy * dy);
}

/// Seeds on a regular grid at (S/2 + i*S, S/2 + j*S), features copied from
/// the pixel under each seed.
inline std::vector<ClusterCenter> init_clusters(const MultiChannelImage& img,
                                                const SlicParams& p) {
  const int s = p.step_size;
  require(s <= std::min(img.width, img.height), errc::step_too_large,
          "step size exceeds the image");
  std::vector<ClusterCenter> centers;
  for (double cy = s / 2.0; cy < img.height; cy += s) {
    for (double cx = s / 2.0; cx < img.width; cx += s) {
      ClusterCenter c;
      c.x = cx;
      c.y = cy;
      int px = static_cast<int>(cx), py = static_cast<int>(cy);
      if (p.perturb_seeds) {
        double best = std::numeric_limits<double>::infinity();
        int bx = px, by = py;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = px + dx, ny = py + dy;
            if (nx < 0 || ny < 0 || nx >= img.width || ny >= img.height) continue;
            const double g = detail::pixel_gradient_sq(img, nx, ny);
            if (g < best) {
              best = g;
              bx = nx;
              by = ny;
            }
          }
        px = bx;
        py = by;
        c.x = px;
        c.y = py;
      }
      const auto pf = img.pixel(px, py);
      c.features.assign(pf.begin(), pf.end());
      c.pixel_count = 1;
      centers.push_back(std::move(c));
    }
  }
  return centers;
}

/// One assignment sweep: every pixel takes the closest center among those
/// within Chebyshev distance 2S; pixels no center reaches keep `prev`.
inline std::vector<std::uint32_t> assign_step(const MultiChannelImage& img,
                                              const std::vector<ClusterCenter>& clusters,
                                              const SlicParams& p,
                                              const std::vector<std::uint32_t>& prev = {}) {
  require(!clusters.empty(), errc::bad_dims, "no clusters to assign to");
  const int w = img.width, h = img.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<std::uint32_t> labels = prev.empty() ? std::vector<std::uint32_t>(n, kNoLabel) : prev;
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  const double reach = 2.0 * p.step_size;

  // rows are split into fixed blocks; each block scans clusters in index
  // order, so ties resolve to the lowest cluster index for any thread count
  parallel_blocks(h, 16, p.threads, [&](std::int64_t, std::int64_t y0, std::int64_t y1) {
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      const ClusterCenter& c = clusters[k];
      const int cy0 = std::max<int>(static_cast<int>(y0), static_cast<int>(std::ceil(c.y - reach)));
      const int cy1 = std::min<int>(static_cast<int>(y1) - 1, static_cast<int>(std::floor(c.y + reach)));
      const int cx0 = std::max(0, static_cast<int>(std::ceil(c.x - reach)));
      const int cx1 = std::min(w - 1, static_cast<int>(std::floor(c.x + reach)));
      for (int y = cy0; y <= cy1; ++y) {
        for (int x = cx0; x <= cx1; ++x) {
          const double d = total_distance_sq(img, x, y, c, p);
          const std::size_t i = static_cast<std::size_t>(y) * w + x;
          if (d < best[i]) {
            best[i] = d;
            labels[i] = static_cast<std::uint32_t>(k);
          }
        }
      }
    }
  });
  return labels;
}

/// Moves every center to the mean position/features of its pixels. Clusters
/// that lost all pixels keep their previous state.
inline std::vector<ClusterCenter> update_step(const MultiChannelImage& img,
                                              const std::vector<std::uint32_t>& labels,
                                              const std::vector<ClusterCenter>& clusters,
                                              int threads = 1) {
  const int w = img.width, h = img.height;
  const int ch = img.channels();
  const std::size_t k = clusters.size();
  const std::size_t stride = ch + 3;  // count, sum x, sum y, per-channel sums

  // fixed 32-row blocks keep the accumulation order independent of `threads`
  const int block_rows = 32;
  const std::int64_t nblocks = (h + block_rows - 1) / block_rows;
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(nblocks));
  parallel_blocks(h, block_rows, threads, [&](std::int64_t b, std::int64_t y0, std::int64_t y1) {
    auto& acc = partial[static_cast<std::size_t>(b)];
    acc.assign(k * stride, 0.0);
    for (std::int64_t y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::uint32_t lab = labels[static_cast<std::size_t>(y) * w + x];
        if (lab == kNoLabel) continue;
        double* a = &acc[lab * stride];
        a[0] += 1.0;
        a[1] += x;
        a[2] += y;
        for (int c = 0; c < ch; ++c)
          a[3 + c] += img.data[img.plane_size() * c + static_cast<std::size_t>(y) * w + x];
      }
    }
  });

  std::vector<double> total(k * stride, 0.0);
  for (const auto& acc : partial)
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += acc[i];

  std::vector<ClusterCenter> out = clusters;
  for (std::size_t i = 0; i < k; ++i) {
    const double* a = &total[i * stride];
    if (a[0] <= 0.0) continue;  // empty cluster: freeze
    out[i].pixel_count = static_cast<std::int64_t>(a[0]);
    out[i].x = a[1] / a[0];
    out[i].y = a[2] / a[0];
    for (int c = 0; c < ch; ++c) out[i].features[c] = a[3 + c] / a[0];
  }
  return out;
}

/// Merges 4-connected components smaller than min_component_frac*S^2 into the
/// neighbor sharing the longest boundary, then renumbers labels in raster
/// order of first occurrence.
inline SuperpixelMap enforce_connectivity(const SuperpixelMap& in, int step_size,
                                          double min_component_frac) {
  const int w = in.width, h = in.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const double threshold = min_component_frac * step_size * step_size;

  // connected components in raster discovery order
  std::vector<std::int32_t> comp(n, -1);
  std::vector<std::int64_t> comp_size;
  std::vector<std::uint32_t> comp_label;
  std::vector<int> stack;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (comp[seed] >= 0) continue;
    const std::int32_t id = static_cast<std::int32_t>(comp_size.size());
    const std::uint32_t lab = in.labels[seed];
    comp_size.push_back(0);
    comp_label.push_back(lab);
    stack.push_back(static_cast<int>(seed));
    comp[seed] = id;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      ++comp_size[id];
      const int x = i % w, y = i / w;
      const int nb[4] = {x > 0 ? i - 1 : -1, x + 1 < w ? i + 1 : -1,
                         y > 0 ? i - w : -1, y + 1 < h ? i + w : -1};
      for (int j : nb) {
        if (j >= 0 && comp[j] < 0 && in.labels[j] == lab) {
          comp[j] = id;
          stack.push_back(j);
        }
      }
    }
  }
  const std::size_t nc = comp_size.size();

  // boundary lengths between adjacent components
  std::vector<std::map<std::int32_t, std::int64_t>> border(nc);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w && comp[i] != comp[i + 1]) {
        ++border[comp[i]][comp[i + 1]];
        ++border[comp[i + 1]][comp[i]];
      }
      if (y + 1 < h && comp[i] != comp[i + w]) {
        ++border[comp[i]][comp[i + w]];
        ++border[comp[i + w]][comp[i]];
      }
    }
  }

  std::vector<std::int32_t> parent(nc);
  for (std::size_t i = 0; i < nc; ++i) parent[i] = static_cast<std::int32_t>(i);
  auto find = [&](std::int32_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };

  std::queue<std::int32_t> work;
  for (std::size_t i = 0; i < nc; ++i)
    if (static_cast<double>(comp_size[i]) < threshold) work.push(static_cast<std::int32_t>(i));

  while (!work.empty()) {
    const std::int32_t r = find(work.front());
    work.pop();
    if (static_cast<double>(comp_size[r]) >= threshold) continue;
    if (border[r].empty()) continue;  // lone group spanning the whole image

    std::int32_t target = -1;
    std::int64_t best_len = -1;
    for (const auto& [nb, len] : border[r]) {
      if (target < 0 || len > best_len ||
          (len == best_len && (comp_label[nb] < comp_label[target] ||
                               (comp_label[nb] == comp_label[target] && nb < target)))) {
        best_len = len;
        target = nb;
      }
    }

    // merge r into target; fold r's adjacency into target's
    parent[r] = target;
    comp_size[target] += comp_size[r];
    for (const auto& [nb, len] : border[r]) {
      if (nb == target) continue;
      border[target][nb] += len;
      auto& back = border[nb];
      back.erase(r);
      back[target] += len;
    }
    border[target].erase(r);
    border[r].clear();
    if (static_cast<double>(comp_size[target]) < threshold) work.push(target);
  }

  SuperpixelMap out(w, h);
  std::vector<std::uint32_t> renumber(nc, kNoLabel);
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t r = find(comp[i]);
    if (renumber[r] == kNoLabel) renumber[r] = next++;
    out.labels[i] = renumber[r];
  }
  return out;
}

/// Full pipeline: grid seeding, `iterations` assign/update sweeps, then
/// connectivity enforcement. Deterministic for any thread count.
inline SuperpixelMap slic_segment(const MultiChannelImage& img, const SlicParams& p) {
  detail::validate_slic(p, img.channels());
  auto clusters = init_clusters(img, p);
  std::vector<std::uint32_t> labels;
  for (int it = 0; it < p.iterations; ++it) {
    labels = assign_step(img, clusters, p, labels);
    clusters = update_step(img, labels, clusters, p.threads);
  }
  SuperpixelMap raw;
  raw.width = img.width;
  raw.height = img.height;
  raw.labels = std::move(labels);
  return enforce_connectivity(raw, p.step_size, p.min_component_frac);
}

}  // namespace spix

#endif  // SPIX_SLIC_HPP

#ifndef SPIX_METRICS_HPP
#define SPIX_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "spix/error.hpp"
#include "spix/image.hpp"

namespace spix {

struct MetricRow {
  std::string name;
  double rec = 0.0;
  double mde = 0.0;
  double ue = 0.0;
  double co = 0.0;
  double iou = 0.0;
};

struct MetricReport {
  std::vector<MetricRow> per_image;
  MetricRow mean;
};

namespace detail {

// exact squared Euclidean distance transform (per-dimension parabola scan)
inline void dt1d(const std::vector<double>& f, std::vector<double>& d, int n) {
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    d[q] = (q - v[k]) * (q - v[k]) + f[v[k]];
  }
}

inline std::vector<double> distance_transform_sq(const std::vector<bool>& mask, int w, int h) {
  constexpr double kFar = 1e12;
  std::vector<double> grid(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = mask[i] ? 0.0 : kFar;

  std::vector<double> f(std::max(w, h)), d(std::max(w, h));
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = grid[static_cast<std::size_t>(y) * w + x];
    dt1d(f, d, h);
    for (int y = 0; y < h; ++y) grid[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = grid[static_cast<std::size_t>(y) * w + x];
    dt1d(f, d, w);
    for (int x = 0; x < w; ++x) grid[static_cast<std::size_t>(y) * w + x] = d[x];
  }
  return grid;
}

// joint histogram over (superpixel, gt segment) pairs plus region sizes
struct Overlap {
  std::unordered_map<std::uint64_t, std::int64_t> joint;
  std::unordered_map<std::uint32_t, std::int64_t> sp_size;
  std::unordered_map<std::uint32_t, std::int64_t> gt_size;
};

inline Overlap overlap_counts(const SuperpixelMap& sp, const SuperpixelMap& gt) {
  require(sp.same_dims(gt), errc::dim_mismatch, "superpixel and ground-truth dims differ");
  Overlap o;
  for (std::size_t i = 0; i < sp.labels.size(); ++i) {
    const std::uint64_t key = (static_cast<std::uint64_t>(sp.labels[i]) << 32) | gt.labels[i];
    ++o.joint[key];
    ++o.sp_size[sp.labels[i]];
    ++o.gt_size[gt.labels[i]];
  }
  return o;
}

}  // namespace detail

/// Fraction of ground-truth boundary pixels with a superpixel boundary pixel
/// within Chebyshev distance `tol`. A boundary-free ground truth scores 1.
inline double boundary_recall(const SuperpixelMap& sp, const SuperpixelMap& gt, int tol = 2) {
  require(sp.same_dims(gt), errc::dim_mismatch, "superpixel and ground-truth dims differ");
  const auto sp_edge = boundary_pixels(sp);
  const auto gt_edge = boundary_pixels(gt);
  const int w = sp.width, h = sp.height;
  std::int64_t total = 0, hit = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!gt_edge[static_cast<std::size_t>(y) * w + x]) continue;
      ++total;
      bool found = false;
      for (int dy = -tol; dy <= tol && !found; ++dy) {
        const int ny = y + dy;
        if (ny < 0 || ny >= h) continue;
        for (int dx = -tol; dx <= tol; ++dx) {
          const int nx = x + dx;
          if (nx < 0 || nx >= w) continue;
          if (sp_edge[static_cast<std::size_t>(ny) * w + nx]) {
            found = true;
            break;
          }
        }
      }
      if (found) ++hit;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(hit) / total;
}

/// Mean Euclidean distance from each ground-truth boundary pixel to the
/// nearest superpixel boundary pixel. Boundary-free ground truth scores 0;
/// a boundary-free superpixel map falls back to the image diagonal.
inline double mean_distance_to_edge(const SuperpixelMap& sp, const SuperpixelMap& gt) {
  require(sp.same_dims(gt), errc::dim_mismatch, "superpixel and ground-truth dims differ");
  const auto gt_edge = boundary_pixels(gt);
  const std::int64_t total = std::count(gt_edge.begin(), gt_edge.end(), true);
  if (total == 0) return 0.0;
  const auto sp_edge = boundary_pixels(sp);
  if (std::find(sp_edge.begin(), sp_edge.end(), true) == sp_edge.end())
    return std::hypot(sp.width, sp.height);
  const auto dist_sq = detail::distance_transform_sq(sp_edge, sp.width, sp.height);
  double sum = 0.0;
  for (std::size_t i = 0; i < gt_edge.size(); ++i)
    if (gt_edge[i]) sum += std::sqrt(dist_sq[i]);
  return sum / total;
}

/// Undersegmentation error: per ground-truth segment, every overlapping
/// superpixel leaks min(inside, outside) pixels; the total is normalized by
/// the pixel count.
inline double undersegmentation_error(const SuperpixelMap& sp, const SuperpixelMap& gt) {
  const auto o = detail::overlap_counts(sp, gt);
  double total = 0.0;
  for (const auto& [key, inside] : o.joint) {
    const std::uint32_t sp_id = static_cast<std::uint32_t>(key >> 32);
    const std::int64_t outside = o.sp_size.at(sp_id) - inside;
    total += static_cast<double>(std::min(inside, outside));
  }
  return total / static_cast<double>(sp.labels.size());
}

/// Size-weighted isoperimetric quotient, clamped at 1. The perimeter counts
/// pixel edges facing a different label or the image border.
inline double compactness(const SuperpixelMap& sp) {
  std::unordered_map<std::uint32_t, std::int64_t> area, perim;
  const int w = sp.width, h = sp.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint32_t l = sp.at(x, y);
      ++area[l];
      if (x == 0 || sp.at(x - 1, y) != l) ++perim[l];
      if (x == w - 1 || sp.at(x + 1, y) != l) ++perim[l];
      if (y == 0 || sp.at(x, y - 1) != l) ++perim[l];
      if (y == h - 1 || sp.at(x, y + 1) != l) ++perim[l];
    }
  }
  const double n = static_cast<double>(sp.labels.size());
  double co = 0.0;
  for (const auto& [l, a] : area) {
    const double p = static_cast<double>(perim.at(l));
    co += (a / n) * std::min(1.0, 4.0 * std::numbers::pi * a / (p * p));
  }
  return co;
}

/// Assigns each superpixel to its maximal-overlap segment (ties to the lower
/// id), reconstructs a segmentation and averages per-segment IoU.
inline double achievable_iou(const SuperpixelMap& sp, const SuperpixelMap& gt) {
  const auto o = detail::overlap_counts(sp, gt);

  std::unordered_map<std::uint32_t, std::pair<std::int64_t, std::uint32_t>> assign;
  for (const auto& [key, cnt] : o.joint) {
    const std::uint32_t sp_id = static_cast<std::uint32_t>(key >> 32);
    const std::uint32_t gt_id = static_cast<std::uint32_t>(key & 0xffffffffu);
    auto it = assign.find(sp_id);
    if (it == assign.end() || cnt > it->second.first ||
        (cnt == it->second.first && gt_id < it->second.second))
      assign[sp_id] = {cnt, gt_id};
  }

  std::unordered_map<std::uint32_t, std::int64_t> recon_size, recon_hit;
  for (const auto& [sp_id, best] : assign) recon_size[best.second] += o.sp_size.at(sp_id);
  for (const auto& [key, cnt] : o.joint) {
    const std::uint32_t sp_id = static_cast<std::uint32_t>(key >> 32);
    const std::uint32_t gt_id = static_cast<std::uint32_t>(key & 0xffffffffu);
    if (assign.at(sp_id).second == gt_id) recon_hit[gt_id] += cnt;
  }

  double sum = 0.0;
  for (const auto& [gt_id, size] : o.gt_size) {
    const std::int64_t hit = recon_hit.count(gt_id) ? recon_hit.at(gt_id) : 0;
    const std::int64_t rsize = recon_size.count(gt_id) ? recon_size.at(gt_id) : 0;
    const std::int64_t uni = size + rsize - hit;
    sum += uni == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(uni);
  }
  return sum / static_cast<double>(o.gt_size.size());
}

/// Per-image metrics plus dataset means.
inline MetricReport evaluate(const std::vector<SuperpixelMap>& sp_set,
                             const std::vector<SuperpixelMap>& gt_set,
                             const std::vector<std::string>& names = {}, int tol = 2) {
  require(sp_set.size() == gt_set.size(), errc::count_mismatch,
          "superpixel and ground-truth sets differ in size");
  require(!sp_set.empty(), errc::count_mismatch, "empty evaluation set");
  MetricReport rep;
  for (std::size_t i = 0; i < sp_set.size(); ++i) {
    MetricRow row;
    row.name = i < names.size() ? names[i] : "image" + std::to_string(i);
    row.rec = boundary_recall(sp_set[i], gt_set[i], tol);
    row.mde = mean_distance_to_edge(sp_set[i], gt_set[i]);
    row.ue = undersegmentation_error(sp_set[i], gt_set[i]);
    row.co = compactness(sp_set[i]);
    row.iou = achievable_iou(sp_set[i], gt_set[i]);
    rep.per_image.push_back(row);
    rep.mean.rec += row.rec;
    rep.mean.mde += row.mde;
    rep.mean.ue += row.ue;
    rep.mean.co += row.co;
    rep.mean.iou += row.iou;
  }
  const double n = static_cast<double>(sp_set.size());
  rep.mean.name = "MEAN";
  rep.mean.rec /= n;
  rep.mean.mde /= n;
  rep.mean.ue /= n;
  rep.mean.co /= n;
  rep.mean.iou /= n;
  return rep;
}

inline void write_metric_csv(std::ostream& out, const MetricReport& rep) {
  out << "image,rec,mde,ue,co,iou\n";
  auto line = [&](const MetricRow& r) {
    out << r.name << ',' << std::fixed << std::setprecision(6) << r.rec << ',' << r.mde << ','
        << r.ue << ',' << r.co << ',' << r.iou << '\n';
  };
  for (const auto& r : rep.per_image) line(r);
  line(rep.mean);
}

inline std::string metric_csv(const MetricReport& rep) {
  std::ostringstream ss;
  write_metric_csv(ss, rep);
  return ss.str();
}

}  // namespace spix

#endif  // SPIX_METRICS_HPP

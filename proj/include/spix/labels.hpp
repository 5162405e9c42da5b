#ifndef SPIX_LABELS_HPP
#define SPIX_LABELS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "spix/dataset.hpp"
#include "spix/error.hpp"
#include "spix/image.hpp"
#include "spix/slic.hpp"
#include "spix/trainpix.hpp"

namespace spix {

/// Per-pixel count of annotations that mark the pixel as a boundary.
struct EdgeMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> strength;

  EdgeMap() = default;
  EdgeMap(int w, int h) : width(w), height(h), strength(static_cast<std::size_t>(w) * h, 0) {}

  std::uint16_t at(int x, int y) const { return strength[static_cast<std::size_t>(y) * width + x]; }
};

enum class LabelMethod { slic_replication, gt_corrected, weakly_supervised };

struct LabelGenConfig {
  LabelMethod method = LabelMethod::slic_replication;
  int X = 1;  // minimum distinct ground-truth segments among the candidates
  int Q = 7;
  SlicParams slic;
  int warmup_iterations = 2;
  std::uint64_t seed = 0;
  bool mine_corrected_only = false;  // keep only pixels the ground truth corrected
};

/// Majority ground-truth segment per cluster; ties go to the lower segment id.
inline std::vector<std::uint32_t> cluster_majority_segment(const SuperpixelMap& labels,
                                                           const SuperpixelMap& gt) {
  require(labels.same_dims(gt), errc::dim_mismatch, "label map and ground truth dims differ");
  std::uint32_t nclusters = 0;
  for (std::uint32_t l : labels.labels)
    if (l != kNoLabel) nclusters = std::max(nclusters, l + 1);

  std::vector<std::map<std::uint32_t, std::int64_t>> counts(nclusters);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    if (labels.labels[i] == kNoLabel) continue;
    ++counts[labels.labels[i]][gt.labels[i]];
  }
  std::vector<std::uint32_t> majority(nclusters, 0);
  for (std::uint32_t k = 0; k < nclusters; ++k) {
    std::int64_t best = -1;
    for (const auto& [seg, cnt] : counts[k]) {  // std::map iterates ids ascending
      if (cnt > best) {
        best = cnt;
        majority[k] = seg;
      }
    }
  }
  return majority;
}

/// Candidate slot with the smallest clustering distance.
inline std::uint32_t slic_replication_label(const MultiChannelImage& img, int x, int y,
                                            const std::vector<ClusterCenter>& clusters,
                                            const std::vector<std::uint32_t>& candidates,
                                            const SlicParams& params) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i] == kMissingCandidate) continue;
    const double d = total_distance_sq(img, x, y, clusters[candidates[i]], params);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best >= 0 ? static_cast<std::uint32_t>(best) : kDroppedSample;
}

/// Like slic_replication_label but restricted to candidates whose majority
/// segment matches the pixel's segment; dropped when none qualifies.
inline std::uint32_t gt_corrected_label(const MultiChannelImage& img, int x, int y,
                                        const std::vector<ClusterCenter>& clusters,
                                        const std::vector<std::uint32_t>& candidates,
                                        const SlicParams& params, std::uint32_t pixel_segment,
                                        const std::vector<std::uint32_t>& majority) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i] == kMissingCandidate) continue;
    if (majority[candidates[i]] != pixel_segment) continue;
    const double d = total_distance_sq(img, x, y, clusters[candidates[i]], params);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best >= 0 ? static_cast<std::uint32_t>(best) : kDroppedSample;
}

/// Keep a pixel iff its candidates cover at least X distinct segments.
inline bool hard_example_filter(const std::vector<std::uint32_t>& candidate_majorities, int x) {
  std::vector<std::uint32_t> distinct;
  for (std::uint32_t m : candidate_majorities) {
    if (m == kMissingCandidate) continue;
    if (std::find(distinct.begin(), distinct.end(), m) == distinct.end()) distinct.push_back(m);
  }
  return static_cast<int>(distinct.size()) >= x;
}

/// Sum of edge strengths along the raster line between two points; endpoints
/// excluded. Rasterized from the lexicographically smaller endpoint so the
/// distance is symmetric.
inline std::int64_t edge_crossing_distance(int x0, int y0, int x1, int y1, const EdgeMap& edges) {
  auto inside = [&](int x, int y) { return x >= 0 && y >= 0 && x < edges.width && y < edges.height; };
  require(inside(x0, y0) && inside(x1, y1), errc::out_of_bounds,
          "edge path endpoint outside the map");
  if (std::pair(x1, y1) < std::pair(x0, y0)) {
    std::swap(x0, x1);
    std::swap(y0, y1);
  }
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  int x = x0, y = y0;
  std::int64_t total = 0;
  while (!(x == x1 && y == y1)) {
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
    if (!(x == x1 && y == y1)) total += edges.at(x, y);
  }
  return total;
}

inline std::int64_t edge_crossing_distance(int x, int y, const ClusterCenter& c,
                                           const EdgeMap& edges) {
  return edge_crossing_distance(x, y, static_cast<int>(std::lround(c.x)),
                                static_cast<int>(std::lround(c.y)), edges);
}

/// In-segment candidate minimizing (edge crossings, spatial distance, slot)
/// lexicographically; without an edge map only the spatial distance counts.
inline std::uint32_t weakly_supervised_label(int x, int y,
                                             const std::vector<ClusterCenter>& clusters,
                                             const std::vector<std::uint32_t>& candidates,
                                             std::uint32_t pixel_segment,
                                             const std::vector<std::uint32_t>& majority,
                                             const EdgeMap* edges = nullptr) {
  int best = -1;
  std::int64_t best_edges = 0;
  double best_dist = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i] == kMissingCandidate) continue;
    const ClusterCenter& c = clusters[candidates[i]];
    if (majority[candidates[i]] != pixel_segment) continue;
    const std::int64_t e = edges ? edge_crossing_distance(x, y, c, *edges) : 0;
    const double d = std::hypot(x - c.x, y - c.y);
    if (best < 0 || e < best_edges || (e == best_edges && d < best_dist)) {
      best = static_cast<int>(i);
      best_edges = e;
      best_dist = d;
    }
  }
  return best >= 0 ? static_cast<std::uint32_t>(best) : kDroppedSample;
}

/// Stacks the boundary maps of several annotations into one strength map.
inline EdgeMap combine_edge_maps(const std::vector<SuperpixelMap>& annotations) {
  require(!annotations.empty(), errc::empty_list, "no annotations to combine");
  const int w = annotations.front().width, h = annotations.front().height;
  EdgeMap out(w, h);
  for (const auto& a : annotations) {
    require(a.width == w && a.height == h, errc::dim_mismatch, "annotation dims differ");
    const auto edge = boundary_pixels(a);
    for (std::size_t i = 0; i < edge.size(); ++i)
      if (edge[i]) ++out.strength[i];
  }
  return out;
}

struct LabeledImage {
  const MultiChannelImage* image = nullptr;
  const SuperpixelMap* gt = nullptr;
  const EdgeMap* edges = nullptr;  // only used by the weakly supervised method
};

struct DatasetStats {
  std::int64_t candidate_pixels = 0;
  std::int64_t kept = 0;
  std::int64_t dropped_filter = 0;     // below the hard-example threshold
  std::int64_t dropped_unlabeled = 0;  // method found no admissible candidate
  std::vector<std::int64_t> distinct_histogram;  // [d] = pixels whose candidates span d segments
  std::vector<std::array<int, 3>> kept_pixels;   // (image index, x, y) per kept sample
};

/// Runs the warm-up clustering, labels every pixel with the configured
/// method, applies hard-example mining, and shuffles the kept samples.
inline SampleSet generate_dataset(const std::vector<LabeledImage>& images,
                                  const LabelGenConfig& cfg, DatasetStats* stats = nullptr) {
  require(!images.empty(), errc::empty_list, "no images");
  require(cfg.X >= 1 && cfg.X <= cfg.Q, errc::bad_dims, "need 1 <= X <= Q");
  require(cfg.warmup_iterations >= 0, errc::bad_dims, "warm-up iterations must be >= 0");

  DatasetStats local;
  local.distinct_histogram.assign(cfg.Q + 1, 0);

  SampleSet set;
  set.Q = cfg.Q;
  set.M = images.front().image->channels();
  std::vector<float> rows;
  std::vector<std::uint32_t> targets;

  TrainpixParams tp;
  tp.base = cfg.slic;
  tp.Q = cfg.Q;
  const int width = set.M + cfg.Q + cfg.Q * set.M;

  for (const LabeledImage& item : images) {
    const MultiChannelImage& img = *item.image;
    const SuperpixelMap& gt = *item.gt;
    require(img.channels() == set.M, errc::dim_mismatch, "images differ in channel count");
    require(gt.width == img.width && gt.height == img.height, errc::dim_mismatch,
            "ground truth dims do not match the image");
    detail::validate_slic(cfg.slic, img.channels());

    // warm-up clustering; majorities come from the label map that produced
    // the final cluster statistics
    auto clusters = init_clusters(img, cfg.slic);
    std::vector<std::uint32_t> warm_labels;
    if (cfg.warmup_iterations == 0) {
      warm_labels = assign_step(img, clusters, cfg.slic);
    } else {
      for (int it = 0; it < cfg.warmup_iterations; ++it) {
        warm_labels = assign_step(img, clusters, cfg.slic, warm_labels);
        if (it + 1 < cfg.warmup_iterations) clusters = update_step(img, warm_labels, clusters);
      }
      clusters = update_step(img, warm_labels, clusters);
    }
    SuperpixelMap warm;
    warm.width = img.width;
    warm.height = img.height;
    warm.labels = warm_labels;
    const auto majority = cluster_majority_segment(warm, gt);

    std::vector<std::uint32_t> cand_majority(cfg.Q);
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        const auto candidates = nearest_q_clusters(x, y, clusters, cfg.Q);
        for (int i = 0; i < cfg.Q; ++i)
          cand_majority[i] = candidates[i] == kMissingCandidate ? kMissingCandidate
                                                                : majority[candidates[i]];
        ++local.candidate_pixels;
        int distinct = 0;
        for (int i = 0; i < cfg.Q; ++i) {
          if (cand_majority[i] == kMissingCandidate) continue;
          bool seen = false;
          for (int j = 0; j < i; ++j) seen = seen || cand_majority[j] == cand_majority[i];
          if (!seen) ++distinct;
        }
        ++local.distinct_histogram[distinct];
        if (distinct < cfg.X) {
          ++local.dropped_filter;
          continue;
        }

        const std::uint32_t seg = gt.at(x, y);
        std::uint32_t target = kDroppedSample;
        switch (cfg.method) {
          case LabelMethod::slic_replication:
            target = slic_replication_label(img, x, y, clusters, candidates, cfg.slic);
            break;
          case LabelMethod::gt_corrected: {
            target = gt_corrected_label(img, x, y, clusters, candidates, cfg.slic, seg, majority);
            if (cfg.mine_corrected_only && target != kDroppedSample) {
              const auto plain = slic_replication_label(img, x, y, clusters, candidates, cfg.slic);
              if (plain == target) target = kDroppedSample;
            }
            break;
          }
          case LabelMethod::weakly_supervised:
            target = weakly_supervised_label(x, y, clusters, candidates, seg, majority, item.edges);
            break;
        }
        if (target == kDroppedSample) {
          ++local.dropped_unlabeled;
          continue;
        }

        rows.resize(rows.size() + width);
        build_input_vector(img, x, y, clusters, candidates, tp, rows.data() + rows.size() - width);
        targets.push_back(target);
        if (stats)
          local.kept_pixels.push_back({static_cast<int>(&item - images.data()), x, y});
        ++local.kept;
      }
    }
  }

  // deterministic shuffle of the kept samples
  std::vector<std::size_t> order(targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937 rng(static_cast<std::uint32_t>(cfg.seed));
  std::shuffle(order.begin(), order.end(), rng);

  set.inputs = Mat<float>(static_cast<int>(targets.size()), width);
  set.targets.resize(targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::copy(rows.begin() + static_cast<std::ptrdiff_t>(order[i]) * width,
              rows.begin() + static_cast<std::ptrdiff_t>(order[i] + 1) * width,
              set.inputs.row(static_cast<int>(i)));
    set.targets[i] = targets[order[i]];
  }
  if (stats) *stats = local;
  return set;
}

}  // namespace spix

#endif  // SPIX_LABELS_HPP

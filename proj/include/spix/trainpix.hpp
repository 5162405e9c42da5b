#ifndef SPIX_TRAINPIX_HPP
#define SPIX_TRAINPIX_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "spix/error.hpp"
#include "spix/image.hpp"
#include "spix/nn_io.hpp"
#include "spix/slic.hpp"
#include "spix/threading.hpp"

namespace spix {

/// Candidate slot with no cluster behind it (image has fewer than Q clusters).
inline constexpr std::uint32_t kMissingCandidate = std::numeric_limits<std::uint32_t>::max();

/// Normalized spatial distance written for missing candidates; large enough
/// that no trained or analytic scorer ever prefers them.
inline constexpr float kMissingDistance = 1e4f;

struct TrainpixParams {
  SlicParams base;  // step size, compactness, iterations, weights (oracle mode)
  int Q = 7;
  int batch = 4096;
};

/// Scores candidates either with a loaded network or with the analytic
/// clustering distance (oracle mode).
struct PixelClassifier {
  AnyNetwork* net = nullptr;
  bool analytic_slic = false;
};

/// Indices of the Q spatially nearest clusters, ascending by distance, ties
/// to the lower index; padded with kMissingCandidate.
inline std::vector<std::uint32_t> nearest_q_clusters(double px, double py,
                                                     const std::vector<ClusterCenter>& clusters,
                                                     int q) {
  std::vector<std::pair<double, std::uint32_t>> order(clusters.size());
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    const double dx = px - clusters[k].x;
    const double dy = py - clusters[k].y;
    order[k] = {dx * dx + dy * dy, static_cast<std::uint32_t>(k)};
  }
  const std::size_t take = std::min<std::size_t>(q, order.size());
  std::partial_sort(order.begin(), order.begin() + take, order.end());
  std::vector<std::uint32_t> out(q, kMissingCandidate);
  for (std::size_t i = 0; i < take; ++i) out[i] = order[i].second;
  return out;
}

/// Writes one classifier input row:
/// [pixel features (M)] [D_q = sigma*dist_q/S (Q)] [cluster-minus-pixel diffs (Q*M)].
inline void build_input_vector(const MultiChannelImage& img, int x, int y,
                               const std::vector<ClusterCenter>& clusters,
                               const std::vector<std::uint32_t>& candidates,
                               const TrainpixParams& p, float* row) {
  const int m = img.channels();
  const int q = p.Q;
  const std::size_t pix = static_cast<std::size_t>(y) * img.width + x;
  for (int c = 0; c < m; ++c) row[c] = img.data[img.plane_size() * c + pix];
  for (int i = 0; i < q; ++i) {
    const std::uint32_t k = candidates[i];
    if (k == kMissingCandidate) {
      row[m + i] = kMissingDistance;
      std::fill(row + m + q + i * m, row + m + q + (i + 1) * m, 0.0f);
      continue;
    }
    const ClusterCenter& c = clusters[k];
    const double dist = std::hypot(x - c.x, y - c.y);
    row[m + i] = static_cast<float>(p.base.compactness * dist / p.base.step_size);
    for (int j = 0; j < m; ++j)
      row[m + q + i * m + j] = static_cast<float>(c.features[j] - row[j]);
  }
}

/// One bottom-up assignment sweep: every pixel is classified among its Q
/// nearest clusters; the argmax candidate (ties to the lowest slot, missing
/// slots never win) becomes its label.
inline std::vector<std::uint32_t> assign_by_classifier(const MultiChannelImage& img,
                                                       const std::vector<ClusterCenter>& clusters,
                                                       const TrainpixParams& p,
                                                       const PixelClassifier& classifier) {
  require(!clusters.empty(), errc::bad_dims, "no clusters to assign to");
  require(classifier.analytic_slic || classifier.net, errc::bad_dims,
          "classifier has no scoring source");
  const int w = img.width, h = img.height;
  const int m = img.channels();
  const int q = p.Q;
  if (classifier.net)
    require(classifier.net->spec.M == m && classifier.net->spec.Q == q, errc::spec_mismatch,
            "network geometry does not match image channels / Q");

  std::vector<std::uint32_t> labels(static_cast<std::size_t>(w) * h, kNoLabel);
  const std::int64_t n = static_cast<std::int64_t>(w) * h;

  parallel_blocks(n, p.batch, p.base.threads, [&](std::int64_t, std::int64_t i0, std::int64_t i1) {
    const int rows = static_cast<int>(i1 - i0);
    std::vector<std::vector<std::uint32_t>> cand(rows);
    for (int r = 0; r < rows; ++r) {
      const std::int64_t i = i0 + r;
      cand[r] = nearest_q_clusters(static_cast<double>(i % w), static_cast<double>(i / w),
                                   clusters, q);
    }

    if (classifier.analytic_slic) {
      for (int r = 0; r < rows; ++r) {
        const std::int64_t i = i0 + r;
        const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < q; ++j) {
          if (cand[r][j] == kMissingCandidate) continue;
          const double score = -total_distance_sq(img, x, y, clusters[cand[r][j]], p.base);
          if (score > best_score) {
            best_score = score;
            best = j;
          }
        }
        if (best >= 0) labels[i] = cand[r][best];
      }
      return;
    }

    Mat<float> batch(rows, m + q + q * m);
    for (int r = 0; r < rows; ++r) {
      const std::int64_t i = i0 + r;
      build_input_vector(img, static_cast<int>(i % w), static_cast<int>(i / w), clusters, cand[r],
                         p, batch.row(r));
    }
    Mat<float> logits = classifier.net->logits(batch);
    for (int r = 0; r < rows; ++r) {
      int best = -1;
      float best_logit = -std::numeric_limits<float>::infinity();
      for (int j = 0; j < q; ++j) {
        if (cand[r][j] == kMissingCandidate) continue;
        if (logits.at(r, j) > best_logit) {
          best_logit = logits.at(r, j);
          best = j;
        }
      }
      if (best >= 0) labels[i0 + r] = cand[r][best];
    }
  });
  return labels;
}

/// Bottom-up pipeline: grid seeding, `iterations` classify/update sweeps,
/// then the same connectivity enforcement as the top-down path.
inline SuperpixelMap trainable_segment(const MultiChannelImage& img, const TrainpixParams& p,
                                       const PixelClassifier& classifier) {
  require(p.Q >= 1, errc::bad_dims, "Q must be >= 1");
  require(p.base.iterations >= 1, errc::bad_dims, "iterations must be >= 1");
  if (classifier.analytic_slic) detail::validate_slic(p.base, img.channels());

  auto clusters = init_clusters(img, p.base);
  std::vector<std::uint32_t> labels;
  for (int it = 0; it < p.base.iterations; ++it) {
    labels = assign_by_classifier(img, clusters, p, classifier);
    clusters = update_step(img, labels, clusters, p.base.threads);
  }
  SuperpixelMap raw;
  raw.width = img.width;
  raw.height = img.height;
  raw.labels = std::move(labels);
  return enforce_connectivity(raw, p.base.step_size, p.base.min_component_frac);
}

}  // namespace spix

#endif  // SPIX_TRAINPIX_HPP

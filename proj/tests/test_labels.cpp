#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "spix/dataset.hpp"
#include "spix/labels.hpp"

using namespace spix;

namespace {

MultiChannelImage lab_image(int w, int h, float fill = 50.0f) {
  MultiChannelImage img;
  img.width = w;
  img.height = h;
  img.channel_names = {"L", "a", "b"};
  img.data.assign(static_cast<std::size_t>(w) * h * 3, fill);
  return img;
}

MultiChannelImage smooth_image(int w, int h, std::uint32_t seed) {
  auto img = lab_image(w, h, 0.0f);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> dist(0.0f, 100.0f);
  const int gw = 5, gh = 5;
  for (int c = 0; c < 3; ++c) {
    float grid[5][5];
    for (auto& row : grid)
      for (auto& v : row) v = dist(rng);
    for (int y = 0; y < h; ++y) {
      const float fy = static_cast<float>(y) * (gh - 1) / (h - 1);
      const int y0 = std::min(gh - 2, static_cast<int>(fy));
      const float ty = fy - y0;
      for (int x = 0; x < w; ++x) {
        const float fx = static_cast<float>(x) * (gw - 1) / (w - 1);
        const int x0 = std::min(gw - 2, static_cast<int>(fx));
        const float tx = fx - x0;
        img.at(x, y, c) = (1 - ty) * ((1 - tx) * grid[y0][x0] + tx * grid[y0][x0 + 1]) +
                          ty * ((1 - tx) * grid[y0 + 1][x0] + tx * grid[y0 + 1][x0 + 1]);
      }
    }
  }
  return img;
}

ClusterCenter center_at(double x, double y, std::vector<double> f = {50, 50, 50}) {
  ClusterCenter c;
  c.x = x;
  c.y = y;
  c.features = std::move(f);
  return c;
}

}  // namespace

TEST(ClusterMajority, MajorityAndTies) {
  SuperpixelMap labels(10, 1);
  SuperpixelMap gt(10, 1);
  // cluster 0: pixels 0..4 entirely in segment 3
  for (int x = 0; x < 5; ++x) {
    labels.at(x, 0) = 0;
    gt.at(x, 0) = 3;
  }
  // cluster 1: 3 pixels segment 1, 2 pixels segment 2
  for (int x = 5; x < 10; ++x) labels.at(x, 0) = 1;
  gt.at(5, 0) = gt.at(6, 0) = gt.at(7, 0) = 1;
  gt.at(8, 0) = gt.at(9, 0) = 2;

  const auto majority = cluster_majority_segment(labels, gt);
  ASSERT_EQ(majority.size(), 2u);
  EXPECT_EQ(majority[0], 3u);
  EXPECT_EQ(majority[1], 1u);

  // 50/50 between segments 2 and 5 resolves to the lower id
  SuperpixelMap l2(4, 1, 0), g2(4, 1);
  g2.labels = {5, 2, 5, 2};
  EXPECT_EQ(cluster_majority_segment(l2, g2)[0], 2u);
}

TEST(ClusterMajority, RejectsDimMismatch) {
  try {
    cluster_majority_segment(SuperpixelMap(4, 4), SuperpixelMap(4, 5));
    FAIL() << "expected DimMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::dim_mismatch);
  }
}

TEST(ReplicationLabel, PicksTheAnalyticWinner) {
  const auto img = lab_image(16, 16);
  SlicParams p;
  p.step_size = 4;
  std::vector<ClusterCenter> clusters = {center_at(2, 2), center_at(8, 8), center_at(14, 14)};

  // pixel co-located with candidate slot 2 and identical features
  const std::vector<std::uint32_t> cands = {2, 0, 1};
  std::vector<std::uint32_t> co = {0, 1, 2};
  EXPECT_EQ(slic_replication_label(img, 14, 14, clusters, co, p), 2u);

  // single-candidate degenerate case
  const std::vector<std::uint32_t> one = {1};
  EXPECT_EQ(slic_replication_label(img, 0, 0, clusters, one, p), 0u);
}

TEST(ReplicationLabel, AgreesWithAssignStepWhenWinnerIsCandidate) {
  const auto img = smooth_image(32, 32, 3);
  SlicParams p;
  p.step_size = 8;
  auto clusters = init_clusters(img, p);
  auto labels = assign_step(img, clusters, p);
  clusters = update_step(img, labels, clusters);
  labels = assign_step(img, clusters, p, labels);

  const int q = 4;
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      const auto cands = nearest_q_clusters(x, y, clusters, q);
      const std::uint32_t winner = labels[static_cast<std::size_t>(y) * 32 + x];
      const auto it = std::find(cands.begin(), cands.end(), winner);
      if (it == cands.end()) continue;
      const auto slot = slic_replication_label(img, x, y, clusters, cands, p);
      EXPECT_EQ(cands[slot], winner) << "pixel " << x << "," << y;
    }
  }
}

TEST(GtCorrectedLabel, RestrictsToThePixelSegment) {
  const auto img = lab_image(16, 8);
  SlicParams p;
  p.step_size = 4;
  p.compactness = 10;

  // pixel at (7,4) sits in segment 0; nearest candidate is across the
  // boundary, second-closest shares the segment
  std::vector<ClusterCenter> clusters = {center_at(8, 4), center_at(5, 4), center_at(14, 4)};
  const std::vector<std::uint32_t> majority = {1, 0, 1};  // cluster -> segment
  const auto cands = nearest_q_clusters(7, 4, clusters, 3);
  EXPECT_EQ(cands[0], 0u);  // the across-boundary cluster really is closest

  const auto plain = slic_replication_label(img, 7, 4, clusters, cands, p);
  EXPECT_EQ(cands[plain], 0u);

  const auto corrected = gt_corrected_label(img, 7, 4, clusters, cands, p, 0, majority);
  EXPECT_EQ(cands[corrected], 1u);  // second-closest, in-segment

  // no candidate in the pixel segment: dropped
  const auto dropped = gt_corrected_label(img, 7, 4, clusters, cands, p, 9, majority);
  EXPECT_EQ(dropped, kDroppedSample);
}

TEST(GtCorrectedLabel, MatchesReplicationWhenWinnerIsInSegment) {
  const auto img = smooth_image(24, 24, 9);
  SlicParams p;
  p.step_size = 8;
  auto clusters = init_clusters(img, p);
  const auto labels = assign_step(img, clusters, p);
  clusters = update_step(img, labels, clusters);

  SuperpixelMap gt(24, 24);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x) gt.at(x, y) = x < 12 ? 0 : 1;
  SuperpixelMap warm;
  warm.width = warm.height = 24;
  warm.labels = labels;
  const auto majority = cluster_majority_segment(warm, gt);

  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x) {
      const auto cands = nearest_q_clusters(x, y, clusters, 4);
      const auto plain = slic_replication_label(img, x, y, clusters, cands, p);
      if (majority[cands[plain]] != gt.at(x, y)) continue;
      EXPECT_EQ(gt_corrected_label(img, x, y, clusters, cands, p, gt.at(x, y), majority), plain);
    }
}

TEST(HardExampleFilter, ThresholdExamples) {
  EXPECT_FALSE(hard_example_filter({1, 1, 1, 1, 1, 1, 1}, 3));
  EXPECT_TRUE(hard_example_filter({1, 2, 4, 1, 2, 4, 1}, 3));
  EXPECT_TRUE(hard_example_filter({5, 5, 5, 5, 5, 5, 5}, 1));  // X=1 keeps everything
  // missing candidates do not count as segments
  EXPECT_FALSE(hard_example_filter({1, 1, kMissingCandidate}, 2));
}

TEST(HardExampleFilter, KeepSetShrinksWithX) {
  // exhaustive over every assignment of 7 candidates to up to 4 segments
  std::vector<std::uint32_t> majorities(7);
  for (int code = 0; code < 16384; ++code) {
    int c = code;
    for (int i = 0; i < 7; ++i) {
      majorities[i] = static_cast<std::uint32_t>(c & 3);
      c >>= 2;
    }
    bool prev = true;
    for (int x = 1; x <= 7; ++x) {
      const bool keep = hard_example_filter(majorities, x);
      EXPECT_TRUE(prev || !keep) << "keep-set grew from X-1 to X=" << x;
      prev = keep;
    }
  }
}

TEST(EdgeCrossing, PathSums) {
  EdgeMap edges(10, 10);
  EXPECT_EQ(edge_crossing_distance(3, 3, 3, 3, edges), 0);  // empty path

  edges.strength[static_cast<std::size_t>(5) * 10 + 4] = 3;  // (4,5)
  EXPECT_EQ(edge_crossing_distance(1, 5, 8, 5, edges), 3);   // crosses once

  // endpoints are excluded
  EXPECT_EQ(edge_crossing_distance(4, 5, 8, 5, edges), 0);

  // running along a strength-1 edge for 4 interior pixels
  EdgeMap line(10, 10);
  for (int x = 0; x < 10; ++x) line.strength[static_cast<std::size_t>(2) * 10 + x] = 1;
  EXPECT_EQ(edge_crossing_distance(2, 2, 7, 2, line), 4);
}

TEST(EdgeCrossing, MatchesBresenhamEnumeration) {
  EdgeMap edges(16, 12);
  std::mt19937 rng(5);
  for (auto& s : edges.strength) s = rng() % 4;

  auto oracle = [&](int x0, int y0, int x1, int y1) {
    if (std::pair(x1, y1) < std::pair(x0, y0)) {
      std::swap(x0, x1);
      std::swap(y0, y1);
    }
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy, x = x0, y = y0;
    std::int64_t sum = 0;
    std::vector<std::pair<int, int>> pts;
    while (true) {
      pts.emplace_back(x, y);
      if (x == x1 && y == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
    }
    for (std::size_t i = 1; i + 1 < pts.size(); ++i)
      sum += edges.strength[static_cast<std::size_t>(pts[i].second) * 16 + pts[i].first];
    return sum;
  };

  for (int trial = 0; trial < 300; ++trial) {
    const int x0 = rng() % 16, y0 = rng() % 12, x1 = rng() % 16, y1 = rng() % 12;
    EXPECT_EQ(edge_crossing_distance(x0, y0, x1, y1, edges), oracle(x0, y0, x1, y1));
    // symmetric regardless of direction
    EXPECT_EQ(edge_crossing_distance(x0, y0, x1, y1, edges),
              edge_crossing_distance(x1, y1, x0, y0, edges));
  }
}

TEST(EdgeCrossing, RejectsOutOfBounds) {
  EdgeMap edges(4, 4);
  try {
    edge_crossing_distance(0, 0, 4, 0, edges);
    FAIL() << "expected OutOfBounds";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::out_of_bounds);
  }
}

TEST(WeaklySupervised, CandidateSelection) {
  std::vector<ClusterCenter> clusters = {center_at(5, 2), center_at(2, 6), center_at(12, 2)};
  const std::vector<std::uint32_t> cands = {0, 1, 2};

  // only cluster 1 shares the pixel segment
  EXPECT_EQ(weakly_supervised_label(2, 2, clusters, cands, 7, {0, 7, 0}), 1u);

  // two in-segment candidates, no edges: the spatially nearer one wins
  EXPECT_EQ(weakly_supervised_label(2, 2, clusters, cands, 7, {7, 7, 0}), 0u);

  // a strength-5 edge in front of the nearer candidate flips the choice
  EdgeMap edges(16, 8);
  edges.strength[static_cast<std::size_t>(2) * 16 + 4] = 5;  // between (2,2) and (5,2)
  EXPECT_EQ(weakly_supervised_label(2, 2, clusters, cands, 7, {7, 7, 0}, &edges), 1u);

  // nothing in-segment: dropped
  EXPECT_EQ(weakly_supervised_label(2, 2, clusters, cands, 7, {0, 0, 0}), kDroppedSample);
}

TEST(CombineEdgeMaps, StrengthCounts) {
  SuperpixelMap split(8, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 8; ++x) split.at(x, y) = x < 4 ? 0 : 1;

  const auto five = combine_edge_maps({split, split, split, split, split});
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 8; ++x)
      EXPECT_EQ(five.at(x, y), (x == 3 || x == 4) ? 5 : 0);

  const auto one = combine_edge_maps({split});
  for (auto s : one.strength) EXPECT_LE(s, 1);

  // disjoint boundaries never stack
  SuperpixelMap other(8, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 8; ++x) other.at(x, y) = x < 1 ? 0 : 1;
  const auto merged = combine_edge_maps({split, other});
  for (auto s : merged.strength) EXPECT_LE(s, 1);

  // symmetric in annotation order
  const auto swapped = combine_edge_maps({other, split});
  EXPECT_EQ(merged.strength, swapped.strength);
}

TEST(CombineEdgeMaps, Errors) {
  try {
    combine_edge_maps({});
    FAIL() << "expected EmptyList";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::empty_list);
  }
  try {
    combine_edge_maps({SuperpixelMap(4, 4), SuperpixelMap(5, 4)});
    FAIL() << "expected DimMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::dim_mismatch);
  }
}

namespace {

// two vertical segments with distinct colors, split at w/2
struct TwoSegmentFixture {
  MultiChannelImage img;
  SuperpixelMap gt;
};

TwoSegmentFixture two_segments(int w, int h) {
  TwoSegmentFixture f;
  f.img = lab_image(w, h);
  f.gt = SuperpixelMap(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      f.img.at(x, y, 0) = x < w / 2 ? 20.0f : 80.0f;
      f.gt.at(x, y) = x < w / 2 ? 0 : 1;
    }
  return f;
}

}  // namespace

TEST(GenerateDataset, KeepsEverythingAtXOne) {
  const auto f = two_segments(32, 32);
  LabelGenConfig cfg;
  cfg.method = LabelMethod::slic_replication;
  cfg.X = 1;
  cfg.Q = 4;
  cfg.slic.step_size = 8;

  DatasetStats stats;
  const auto set = generate_dataset({{&f.img, &f.gt, nullptr}}, cfg, &stats);
  EXPECT_EQ(stats.candidate_pixels, 32 * 32);
  EXPECT_EQ(stats.kept, 32 * 32);
  EXPECT_EQ(stats.dropped_filter, 0);
  EXPECT_EQ(stats.dropped_unlabeled, 0);
  EXPECT_EQ(set.size(), 32 * 32);
  EXPECT_EQ(set.M, 3);
  EXPECT_EQ(set.Q, 4);
  EXPECT_EQ(set.inputs.cols, 3 + 4 + 4 * 3);

  std::int64_t hist_total = 0;
  for (auto c : stats.distinct_histogram) hist_total += c;
  EXPECT_EQ(hist_total, stats.candidate_pixels);
}

TEST(GenerateDataset, KeptCountIsMonotoneInX) {
  const auto f = two_segments(32, 32);
  std::int64_t prev = std::numeric_limits<std::int64_t>::max();
  for (int x = 1; x <= 4; ++x) {
    LabelGenConfig cfg;
    cfg.method = LabelMethod::slic_replication;
    cfg.X = x;
    cfg.Q = 4;
    cfg.slic.step_size = 8;
    DatasetStats stats;
    generate_dataset({{&f.img, &f.gt, nullptr}}, cfg, &stats);
    EXPECT_LE(stats.kept, prev);
    prev = stats.kept;
  }
}

TEST(GenerateDataset, BoundaryConcentrationAtXTwo) {
  const auto f = two_segments(64, 64);
  LabelGenConfig cfg;
  cfg.method = LabelMethod::gt_corrected;
  cfg.X = 2;
  cfg.Q = 7;
  cfg.slic.step_size = 8;

  DatasetStats stats;
  const auto set = generate_dataset({{&f.img, &f.gt, nullptr}}, cfg, &stats);
  ASSERT_GT(stats.kept, 0);
  for (const auto& [image, x, y] : stats.kept_pixels)
    EXPECT_LE(std::abs(x - 31.5), 2.0 * cfg.slic.step_size) << "pixel " << x << "," << y;
}

TEST(GenerateDataset, DeterministicUnderSeed) {
  const auto f = two_segments(32, 32);
  LabelGenConfig cfg;
  cfg.method = LabelMethod::weakly_supervised;
  cfg.X = 1;
  cfg.Q = 4;
  cfg.slic.step_size = 8;
  cfg.seed = 99;

  const auto a = generate_dataset({{&f.img, &f.gt, nullptr}}, cfg);
  const auto b = generate_dataset({{&f.img, &f.gt, nullptr}}, cfg);
  EXPECT_EQ(a.inputs.v, b.inputs.v);
  EXPECT_EQ(a.targets, b.targets);

  LabelGenConfig other = cfg;
  other.seed = 100;
  const auto c = generate_dataset({{&f.img, &f.gt, nullptr}}, other);
  EXPECT_NE(a.targets, c.targets);  // different shuffle order
}

TEST(GenerateDataset, CorrectedOnlyMiningKeepsCorrectionsOnly) {
  const auto f = two_segments(48, 32);
  LabelGenConfig base;
  base.method = LabelMethod::gt_corrected;
  base.X = 1;
  base.Q = 4;
  base.slic.step_size = 8;

  DatasetStats all_stats;
  generate_dataset({{&f.img, &f.gt, nullptr}}, base, &all_stats);

  LabelGenConfig mined = base;
  mined.mine_corrected_only = true;
  DatasetStats mined_stats;
  generate_dataset({{&f.img, &f.gt, nullptr}}, mined, &mined_stats);
  EXPECT_LT(mined_stats.kept, all_stats.kept);
}

TEST(SampleSet, SpdsRoundTrip) {
  SampleSet s;
  s.M = 3;
  s.Q = 2;
  s.inputs = Mat<float>(5, s.row_width());
  std::mt19937 rng(3);
  std::uniform_real_distribution<float> dist(-4.0f, 4.0f);
  for (auto& v : s.inputs.v) v = dist(rng);
  s.targets = {0, 1, 1, 0, 1};

  const auto p = std::filesystem::temp_directory_path() / "spix_labels_set.spds";
  write_sample_set(p.string(), s);
  const auto back = read_sample_set(p.string());
  EXPECT_EQ(back.M, s.M);
  EXPECT_EQ(back.Q, s.Q);
  EXPECT_EQ(back.inputs.v, s.inputs.v);
  EXPECT_EQ(back.targets, s.targets);
}

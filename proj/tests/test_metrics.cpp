#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "spix/metrics.hpp"

using namespace spix;

namespace {

SuperpixelMap vertical_split(int w, int h, int at) {
  SuperpixelMap m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.at(x, y) = x < at ? 0 : 1;
  return m;
}

SuperpixelMap square_grid(int n, int s) {
  SuperpixelMap m(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) m.at(x, y) = static_cast<std::uint32_t>((y / s) * (n / s) + x / s);
  return m;
}

SuperpixelMap random_map(int w, int h, int nlabels, std::uint32_t seed) {
  SuperpixelMap m(w, h);
  std::mt19937 rng(seed);
  for (auto& l : m.labels) l = rng() % nlabels;
  return m;
}

SuperpixelMap relabel(const SuperpixelMap& m, std::uint32_t seed) {
  std::uint32_t mx = 0;
  for (auto l : m.labels) mx = std::max(mx, l + 1);
  std::vector<std::uint32_t> perm(mx);
  for (std::uint32_t i = 0; i < mx; ++i) perm[i] = i;
  std::mt19937 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  SuperpixelMap out = m;
  for (auto& l : out.labels) l = perm[l] + 5;  // offset: ids need not be contiguous
  return out;
}

}  // namespace

TEST(BoundaryPixels, Definition) {
  const SuperpixelMap uniform(6, 4, 3);
  const auto none = boundary_pixels(uniform);
  EXPECT_TRUE(std::none_of(none.begin(), none.end(), [](bool b) { return b; }));

  const auto split = vertical_split(8, 4, 5);
  const auto edge = boundary_pixels(split);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 8; ++x)
      EXPECT_EQ(edge[static_cast<std::size_t>(y) * 8 + x], x == 4 || x == 5);

  SuperpixelMap dot(5, 5, 0);
  dot.at(2, 2) = 1;
  const auto de = boundary_pixels(dot);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) {
      const bool expect = (x == 2 && y == 2) || (std::abs(x - 2) + std::abs(y - 2) == 1);
      EXPECT_EQ(de[static_cast<std::size_t>(y) * 5 + x], expect);
    }
}

TEST(BoundaryRecall, IdenticalAndVacuous) {
  const auto sp = vertical_split(16, 8, 7);
  EXPECT_EQ(boundary_recall(sp, sp), 1.0);
  EXPECT_EQ(boundary_recall(sp, SuperpixelMap(16, 8, 0)), 1.0);  // no gt boundary
}

TEST(BoundaryRecall, FarBoundaryMisses) {
  // sp boundary at x=10/11, gt boundary at x=4/5: offset 5 > tol 2
  const auto sp = vertical_split(24, 8, 11);
  const auto gt = vertical_split(24, 8, 5);
  EXPECT_EQ(boundary_recall(sp, gt, 2), 0.0);
  EXPECT_EQ(boundary_recall(sp, gt, 6), 1.0);
}

TEST(BoundaryRecall, RejectsDimMismatch) {
  try {
    boundary_recall(SuperpixelMap(4, 4), SuperpixelMap(5, 4));
    FAIL() << "expected DimMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::dim_mismatch);
  }
}

TEST(MeanDistanceToEdge, ParallelBoundaries) {
  const auto sp = vertical_split(32, 8, 10);
  EXPECT_EQ(mean_distance_to_edge(sp, sp), 0.0);

  // boundaries are two-sided: sp marks columns 9,10 and gt marks 12,13,
  // so the per-pixel distances are 2 and 3 and the mean is 2.5
  const auto gt = vertical_split(32, 8, 13);
  EXPECT_DOUBLE_EQ(mean_distance_to_edge(sp, gt), 2.5);

  EXPECT_EQ(mean_distance_to_edge(sp, SuperpixelMap(32, 8, 0)), 0.0);  // vacuous gt
}

TEST(MeanDistanceToEdge, MatchesBruteForce) {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto sp = random_map(20, 14, 4, rng());
    const auto gt = random_map(20, 14, 3, rng());
    const auto sp_edge = boundary_pixels(sp);
    const auto gt_edge = boundary_pixels(gt);

    double sum = 0.0;
    std::int64_t count = 0;
    for (int y = 0; y < 14; ++y)
      for (int x = 0; x < 20; ++x) {
        if (!gt_edge[static_cast<std::size_t>(y) * 20 + x]) continue;
        double best = 1e18;
        for (int v = 0; v < 14; ++v)
          for (int u = 0; u < 20; ++u)
            if (sp_edge[static_cast<std::size_t>(v) * 20 + u])
              best = std::min(best, std::hypot(u - x, v - y));
        sum += best;
        ++count;
      }
    const double expect = count == 0 ? 0.0 : sum / count;
    EXPECT_NEAR(mean_distance_to_edge(sp, gt), expect, 1e-9);
  }
}

TEST(UndersegmentationError, Fixtures) {
  // nested superpixels leak nothing
  const auto grid = square_grid(8, 2);
  const auto gt2 = vertical_split(8, 8, 4);
  EXPECT_EQ(undersegmentation_error(grid, gt2), 0.0);

  SuperpixelMap gt(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) gt.at(x, y) = y < 4 ? 0 : 1;

  // a 16-pixel superpixel straddling the boundary 12/4, everything else
  // nested: both overlaps contribute min(in, out) = 4, so 8/64
  SuperpixelMap sp(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      if (x >= 2 && x < 6 && y >= 1 && y < 5) sp.at(x, y) = 9;
      else sp.at(x, y) = (y < 4 ? 0 : 4) + (x < 2 ? 0 : x < 6 ? 1 : 2);
    }
  EXPECT_EQ(undersegmentation_error(sp, gt), 0.125);

  // an 8/8 straddler leaks 8 pixels into each of the two segments
  SuperpixelMap even(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      if (x >= 2 && x < 6 && y >= 2 && y < 6) even.at(x, y) = 9;
      else even.at(x, y) = (y < 4 ? 0 : 4) + (x < 2 ? 0 : x < 6 ? 1 : 2);
    }
  EXPECT_EQ(undersegmentation_error(even, gt), 0.25);

  // a single superpixel over two equal halves leaks half the image twice
  const SuperpixelMap one(8, 8, 0);
  EXPECT_EQ(undersegmentation_error(one, gt), 1.0);
}

TEST(UndersegmentationError, SplittingAlongTheBoundaryHelps) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const int at = 3 + static_cast<int>(rng() % 6);
    const auto gt = vertical_split(12, 6, at);
    SuperpixelMap straddle(12, 6, 0);
    for (int y = 0; y < 6; ++y)
      for (int x = 6; x < 12; ++x) straddle.at(x, y) = 1;
    SuperpixelMap split = straddle;
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 12; ++x)
        split.at(x, y) = straddle.at(x, y) * 2 + (x < at ? 0 : 1);
    EXPECT_LE(undersegmentation_error(split, gt), undersegmentation_error(straddle, gt));
  }
}

TEST(Compactness, SquaresHitTheIsoperimetricRatio) {
  // a single square region filling the whole image
  EXPECT_NEAR(compactness(SuperpixelMap(16, 16, 0)), std::numbers::pi / 4, 1e-12);
  // a single pixel: min(1, 4*pi/16) is also pi/4
  EXPECT_NEAR(compactness(SuperpixelMap(1, 1, 0)), std::numbers::pi / 4, 1e-12);
  // any grid of S x S squares
  EXPECT_NEAR(compactness(square_grid(16, 4)), std::numbers::pi / 4, 1e-9);
  EXPECT_NEAR(compactness(square_grid(24, 8)), std::numbers::pi / 4, 1e-9);
}

TEST(Compactness, StripsScoreBelowSquares) {
  SuperpixelMap strips(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) strips.at(x, y) = y;
  EXPECT_LT(compactness(strips), std::numbers::pi / 4);
}

TEST(AchievableIoU, Fixtures) {
  const auto gt = vertical_split(8, 8, 4);
  EXPECT_EQ(achievable_iou(gt, gt), 1.0);

  // superpixel boundaries refine the gt: perfect reconstruction
  EXPECT_EQ(achievable_iou(square_grid(8, 2), gt), 1.0);

  // one superpixel across two equal segments: IoU(1/2) for the winner
  // (lower id) and 0 for the loser
  EXPECT_EQ(achievable_iou(SuperpixelMap(8, 8, 0), gt), 0.25);
}

TEST(Metrics, RelabelingInvariance) {
  std::mt19937 rng(77);
  const auto sp = square_grid(12, 3);
  const auto gt = vertical_split(12, 12, 7);
  const auto sp2 = relabel(sp, rng());
  const auto gt2 = relabel(gt, rng());

  EXPECT_DOUBLE_EQ(boundary_recall(sp, gt), boundary_recall(sp2, gt2));
  EXPECT_DOUBLE_EQ(mean_distance_to_edge(sp, gt), mean_distance_to_edge(sp2, gt2));
  EXPECT_DOUBLE_EQ(undersegmentation_error(sp, gt), undersegmentation_error(sp2, gt2));
  EXPECT_DOUBLE_EQ(compactness(sp), compactness(sp2));
  EXPECT_DOUBLE_EQ(achievable_iou(sp, gt), achievable_iou(sp2, gt2));
}

TEST(Evaluate, ReportAndCsv) {
  const auto a = square_grid(8, 2);
  const auto b = vertical_split(8, 8, 4);
  const auto rep = evaluate({a, b}, {a, b}, {"first", "second"});
  EXPECT_EQ(rep.per_image.size(), 2u);
  EXPECT_EQ(rep.mean.rec, 1.0);
  EXPECT_EQ(rep.mean.iou, 1.0);
  EXPECT_EQ(rep.mean.mde, 0.0);
  EXPECT_EQ(rep.mean.ue, 0.0);

  const std::string csv = metric_csv(rep);
  EXPECT_NE(csv.find("image,rec,mde,ue,co,iou\n"), std::string::npos);
  EXPECT_NE(csv.find("first,1.000000,0.000000,0.000000,"), std::string::npos);
  EXPECT_NE(csv.find("MEAN,1.000000,0.000000,0.000000,"), std::string::npos);

  // single image: means equal the row
  const auto solo = evaluate({a}, {b});
  EXPECT_EQ(solo.mean.rec, solo.per_image[0].rec);
  EXPECT_EQ(solo.mean.ue, solo.per_image[0].ue);

  // permutation invariance of the means
  const auto fwd = evaluate({a, b}, {b, a});
  const auto rev = evaluate({b, a}, {a, b});
  EXPECT_DOUBLE_EQ(fwd.mean.ue, rev.mean.ue);
  EXPECT_DOUBLE_EQ(fwd.mean.rec, rev.mean.rec);
}

TEST(Evaluate, RejectsCountMismatch) {
  try {
    evaluate({SuperpixelMap(4, 4)}, {});
    FAIL() << "expected CountMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::count_mismatch);
  }
}

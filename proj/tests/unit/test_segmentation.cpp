#include <gtest/gtest.h>

#include <set>

#include "burnsight/error.hpp"
#include "burnsight/image_io.hpp"
#include "burnsight/segmentation.hpp"
#include "burnsight/synth.hpp"
#include "test_support.hpp"

using namespace burnsight;
using namespace burnsight::segmentation;
using burnsight::imaging::GrayImage;

namespace {

GrayImage half_planes(int w, int h) {
  std::vector<double> px(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) px[y * w + x] = x < w / 2 ? 0.0 : 1.0;
  return GrayImage(w, h, std::move(px));
}

void expect_partition(const SegmentMap& m) {
  ASSERT_EQ(m.labels().size(), static_cast<std::size_t>(m.width()) * m.height());
  std::vector<std::size_t> sizes(m.count(), 0);
  for (const auto l : m.labels()) {
    ASSERT_GE(l, 0);
    ASSERT_LT(l, m.count());
    ++sizes[l];
  }
  for (const auto s : sizes) EXPECT_GT(s, 0u);
}

}  // namespace

TEST(SegmentMap, ValidatesAndRelabels) {
  EXPECT_THROW(SegmentMap(2, 1, {0, 2}), UsageError);
  EXPECT_THROW(SegmentMap(2, 1, {0}), UsageError);
  EXPECT_THROW(SegmentMap(2, 1, {-1, 0}), UsageError);
  const auto m = SegmentMap::from_raw(3, 1, {7, 2, 7});
  EXPECT_EQ(m.labels(), (std::vector<std::int32_t>{0, 1, 0}));
  EXPECT_EQ(m.count(), 2);
}

TEST(Grid, TileCounts) {
  const GrayImage img(224, 224, 0.5);
  const auto four = segment_grid(img, 2, 2);
  EXPECT_EQ(four.count(), 4);
  for (auto s : four.segment_sizes()) EXPECT_EQ(s, 112u * 112u);
  EXPECT_EQ(segment_grid(img, 1, 1).count(), 1);

  const auto nine = segment_grid(img, 3, 3);
  EXPECT_EQ(nine.count(), 9);
  const auto sizes = nine.segment_sizes();
  EXPECT_EQ(sizes[0], 74u * 74u);
  EXPECT_EQ(sizes[2], 76u * 74u);
  EXPECT_EQ(sizes[8], 76u * 76u);
  EXPECT_THROW(segment_grid(img, 0, 2), UsageError);
  EXPECT_THROW(segment_grid(GrayImage(3, 3, 0.0), 4, 1), UsageError);
}

TEST(Felzenszwalb, ConstantImageIsOneSegment) {
  EXPECT_EQ(segment_felzenszwalb(GrayImage(40, 30, 0.6)).count(), 1);
}

TEST(Felzenszwalb, HalfPlanesSplitExactly) {
  FelzenszwalbParams p{0.01, 0.0, 1};
  const auto img = half_planes(16, 12);
  const auto m = segment_felzenszwalb(img, p);
  ASSERT_EQ(m.count(), 2);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 16; ++x) EXPECT_EQ(m.at(x, y), x < 8 ? m.at(0, 0) : m.at(15, 0));
}

TEST(Felzenszwalb, PartitionAndMinSizeOnRandomImages) {
  FelzenszwalbParams p{50.0, 0.5, 15};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto m = segment_felzenszwalb(burnsight::testing::random_image(30, 25, s), p);
    expect_partition(m);
    for (auto size : m.segment_sizes()) EXPECT_GE(size, 15u);
  }
}

TEST(Quickshift, HalfPlanesSplitExactly) {
  QuickshiftParams p{2.0, 4.0, 1000.0};
  const auto img = half_planes(16, 12);
  const auto m = segment_quickshift(img, p);
  ASSERT_EQ(m.count(), 2);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 16; ++x) EXPECT_EQ(m.at(x, y), x < 8 ? m.at(0, 0) : m.at(15, 0));

  // No link crosses the intensity gap.
  const auto links = quickshift_links(img, p);
  for (std::size_t i = 0; i < links.size(); ++i) {
    EXPECT_EQ(static_cast<int>(i % 16) < 8, static_cast<int>(links[i] % 16) < 8);
  }
}

TEST(Quickshift, LinksPointStrictlyUphill) {
  const QuickshiftParams p;
  const auto img = burnsight::testing::random_image(24, 20, 77);
  const auto density = quickshift_density(img, p);
  const auto links = quickshift_links(img, p);
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i] == i) continue;
    const bool higher = density[links[i]] > density[i] || (density[links[i]] == density[i] && links[i] < i);
    EXPECT_TRUE(higher) << "pixel " << i;
  }
}

TEST(Quickshift, PartitionOnRandomImages) {
  for (std::uint64_t s = 0; s < 20; ++s) expect_partition(segment_quickshift(burnsight::testing::random_image(28, 22, s)));
}

TEST(Segmenters, DeterministicAndThreadIndependent) {
  const auto img = burnsight::testing::random_image(48, 40, 5);
  EXPECT_EQ(segment_quickshift(img), segment_quickshift(img));
  EXPECT_EQ(segment_felzenszwalb(img), segment_felzenszwalb(img));
  const auto many = segment_quickshift(img);
  setenv("BURNSIGHT_THREADS", "1", 1);
  const auto one = segment_quickshift(img);
  unsetenv("BURNSIGHT_THREADS");
  EXPECT_EQ(many, one);
}

TEST(Segmenters, DefaultsGiveModerateCountsOnSpeckle) {
  imaging::SynthConfig cfg;
  for (int c = 0; c < 3; ++c) {
    const auto img = imaging::synthesize_speckle(cfg.class_params[c], 224, 10 + c);
    const int q = segment_quickshift(img).count();
    const int f = segment_felzenszwalb(img).count();
    EXPECT_GE(q, 20);
    EXPECT_LE(q, 80);
    EXPECT_GE(f, 10);
    EXPECT_LE(f, 80);
  }
}

TEST(Segmenters, ParamValidation) {
  EXPECT_THROW((QuickshiftParams{0.0, 8.0, 10.0}.validate()), UsageError);
  EXPECT_THROW((QuickshiftParams{4.0, 0.0, 10.0}.validate()), UsageError);
  EXPECT_THROW((FelzenszwalbParams{0.0, 0.8, 20}.validate()), UsageError);
  EXPECT_THROW((FelzenszwalbParams{100.0, 0.8, 0}.validate()), UsageError);
}

TEST(SegmentPng, WritesSixteenBitLabels) {
  burnsight::testing::TempDir dir;
  const auto m = segment_grid(GrayImage(10, 10, 0.0), 2, 2);
  save_segment_png(m, dir / "s.png");
  const auto back = imaging::load_image(dir / "s.png");
  EXPECT_DOUBLE_EQ(back.at(9, 9), 3.0 / 65535.0);
}

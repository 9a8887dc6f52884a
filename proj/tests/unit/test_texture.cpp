#include <gtest/gtest.h>

#include "burnsight/error.hpp"
#include "burnsight/texture.hpp"
#include "test_support.hpp"

using namespace burnsight;
using namespace burnsight::texture;
using burnsight::imaging::GrayImage;

namespace {

GrayImage checkerboard(int n) {
  std::vector<double> px(static_cast<std::size_t>(n) * n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) px[y * n + x] = (x + y) % 2 ? 1.0 : 0.0;
  return GrayImage(n, n, std::move(px));
}

GrayImage transpose(const GrayImage& img) {
  std::vector<double> px(img.size());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) px[x * img.height() + y] = img.at(x, y);
  return GrayImage(img.height(), img.width(), std::move(px));
}

}  // namespace

TEST(Quantize, Boundaries) {
  const GrayImage img(3, 1, std::vector<double>{0.0, 1.0, 0.5});
  const auto g = quantize(img, 32);
  EXPECT_EQ(g.at(0, 0), 0);
  EXPECT_EQ(g.at(1, 0), 31);
  EXPECT_EQ(g.at(2, 0), 16);
}

TEST(Glcm, ConstantImage) {
  const auto glcm = compute_glcm(quantize(GrayImage(6, 5, 0.3), 8), GlcmConfig{8});
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) EXPECT_EQ(glcm.at(i, j), (i == 2 && j == 2) ? 1.0 : 0.0);
  const auto f = haralick_features(glcm);
  EXPECT_EQ(f.contrast, 0.0);
  EXPECT_EQ(f.dissimilarity, 0.0);
  EXPECT_EQ(f.homogeneity, 1.0);
  EXPECT_EQ(f.asm_, 1.0);
  EXPECT_EQ(f.energy, 1.0);
}

TEST(Glcm, HorizontalCheckerboard) {
  GlcmConfig cfg{2, {{0, 1}}, true};
  const auto glcm = compute_glcm(quantize(checkerboard(4), 2), cfg);
  EXPECT_EQ(glcm.at(0, 1), 0.5);
  EXPECT_EQ(glcm.at(1, 0), 0.5);
  EXPECT_EQ(glcm.at(0, 0), 0.0);
  const auto f = haralick_features(glcm);
  EXPECT_EQ(f.contrast, 1.0);
  EXPECT_EQ(f.dissimilarity, 1.0);
  EXPECT_EQ(f.homogeneity, 0.5);
  EXPECT_EQ(f.asm_, 0.5);
  EXPECT_NEAR(f.energy, 0.70711, 1e-5);
}

TEST(Glcm, MatchesBruteForceOracle) {
  const std::vector<Offset> offsets = GlcmConfig{}.offsets;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto img = burnsight::testing::random_image(8, 8, s);
    for (bool symmetric : {true, false}) {
      const auto glcm = compute_glcm(quantize(img, 8), GlcmConfig{8, offsets, symmetric});
      const auto oracle = burnsight::testing::naive_glcm(img, 8, offsets, symmetric);
      for (std::size_t k = 0; k < oracle.size(); ++k) ASSERT_NEAR(glcm.p[k], oracle[k], 1e-12);
    }
  }
}

TEST(Glcm, SumsToOneAndIsSymmetric) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto img = burnsight::testing::random_image(9 + s % 5, 7 + s % 3, 100 + s);
    const auto glcm = compute_glcm(quantize(img, 16), GlcmConfig{16});
    double sum = 0;
    for (double v : glcm.p) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-9);
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j) EXPECT_EQ(glcm.at(i, j), glcm.at(j, i));
  }
}

TEST(Glcm, RejectsDegenerateInputs) {
  EXPECT_THROW((GlcmConfig{1}.validate()), UsageError);
  EXPECT_THROW((GlcmConfig{8, {}}.validate()), UsageError);
  EXPECT_THROW((GlcmConfig{8, {{0, 0}}}.validate()), UsageError);
  EXPECT_THROW(compute_glcm(quantize(GrayImage(1, 1, 0.5), 8), GlcmConfig{8}), UsageError);
}

TEST(Haralick, MatchesDirectSummation) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Glcm glcm{8, std::vector<double>(64)};
    double total = 0;
    for (auto& v : glcm.p) total += (v = u(gen));
    for (auto& v : glcm.p) v /= total;
    const auto f = haralick_features(glcm);
    const auto o = burnsight::testing::naive_haralick(glcm.p, 8);
    EXPECT_NEAR(f.contrast, o.contrast, 1e-12);
    EXPECT_NEAR(f.dissimilarity, o.dissimilarity, 1e-12);
    EXPECT_NEAR(f.homogeneity, o.homogeneity, 1e-12);
    EXPECT_NEAR(f.asm_, o.asm_, 1e-12);
    EXPECT_NEAR(f.energy, o.energy, 1e-12);
  }
}

TEST(Haralick, InvariantsOnRandomImages) {
  const int g = 32;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto img = burnsight::testing::random_image(20, 17, 500 + s);
    const auto f = haralick_features(compute_glcm(quantize(img, g), GlcmConfig{}));
    EXPECT_GE(f.homogeneity, 0.0);
    EXPECT_LE(f.homogeneity, 1.0);
    EXPECT_GT(f.asm_, 0.0);
    EXPECT_LE(f.asm_, 1.0);
    EXPECT_LE(f.contrast, (g - 1.0) * (g - 1.0));
    EXPECT_LE(f.dissimilarity, g - 1.0);
    EXPECT_NEAR(f.energy * f.energy, f.asm_, 4 * std::numeric_limits<double>::epsilon() * f.asm_);
  }
}

TEST(Haralick, TranspositionInvariance) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto img = burnsight::testing::random_image(15, 11, 900 + s);
    const auto a = haralick_features(compute_glcm(quantize(img, 32), GlcmConfig{}));
    const auto b = haralick_features(compute_glcm(quantize(transpose(img), 32), GlcmConfig{}));
    EXPECT_NEAR(a.contrast, b.contrast, 1e-12);
    EXPECT_NEAR(a.dissimilarity, b.dissimilarity, 1e-12);
    EXPECT_NEAR(a.homogeneity, b.homogeneity, 1e-12);
    EXPECT_NEAR(a.asm_, b.asm_, 1e-12);
  }
}

TEST(Haralick, LevelShiftInvariance) {
  const int g = 16;
  for (std::uint64_t s = 0; s < 10; ++s) {
    LevelGrid grid{12, 10, g, {}};
    std::mt19937_64 gen(s);
    for (int i = 0; i < 120; ++i) grid.data.push_back(static_cast<std::uint16_t>(gen() % 10));
    LevelGrid shifted = grid;
    for (auto& v : shifted.data) v = static_cast<std::uint16_t>(v + 5);
    const auto a = haralick_features(compute_glcm(grid, GlcmConfig{g}));
    const auto b = haralick_features(compute_glcm(shifted, GlcmConfig{g}));
    EXPECT_NEAR(a.contrast, b.contrast, 1e-12);
    EXPECT_NEAR(a.dissimilarity, b.dissimilarity, 1e-12);
    EXPECT_NEAR(a.homogeneity, b.homogeneity, 1e-12);
    EXPECT_NEAR(a.asm_, b.asm_, 1e-12);
  }
}

TEST(TextureVector, SelectionsAndOrder) {
  GlcmConfig horizontal{2, {{0, 1}}, true};
  EXPECT_EQ(texture_vector(checkerboard(4), horizontal, FeatureSelection::parse("contrast")),
            std::vector<double>{1.0});
  EXPECT_EQ(texture_vector(GrayImage(8, 8, 0.4), GlcmConfig{}, FeatureSelection::all()),
            (std::vector<double>{0, 1, 1, 1, 0}));
  EXPECT_TRUE(texture_vector(GrayImage(8, 8, 0.4), GlcmConfig{}, FeatureSelection::none()).empty());
}

TEST(FeatureSelection, ParsingAndNames) {
  EXPECT_EQ(FeatureSelection::parse("none").size(), 0u);
  EXPECT_EQ(FeatureSelection::parse("all").size(), 5u);
  const auto pair = FeatureSelection::parse("energy,contrast");
  ASSERT_EQ(pair.size(), 2u);
  EXPECT_EQ(pair.features()[0], HaralickFeature::kContrast);
  EXPECT_EQ(pair.features()[1], HaralickFeature::kEnergy);
  EXPECT_EQ(pair.name(), "contrast+energy");
  EXPECT_EQ(FeatureSelection::parse(pair.name()), pair);
  EXPECT_EQ(FeatureSelection::parse("all").name(), "all");
  EXPECT_THROW(FeatureSelection::parse("entropy"), UsageError);
  EXPECT_EQ(FeatureSelection::parse("").size(), 0u);
  EXPECT_THROW(FeatureSelection::parse("contrast,,asm"), UsageError);
}

#include <gtest/gtest.h>

#include <fstream>

#include "burnsight/error.hpp"
#include "burnsight/image_io.hpp"
#include "burnsight/manifest.hpp"
#include "burnsight/preprocess.hpp"
#include "burnsight/synth.hpp"
#include "burnsight/texture.hpp"
#include "test_support.hpp"

using namespace burnsight;
using namespace burnsight::imaging;
using burnsight::testing::TempDir;

namespace {

void write_pgm8(const std::filesystem::path& p, int w, int h, std::uint8_t value) {
  std::ofstream out(p, std::ios::binary);
  out << "P5\n" << w << " " << h << "\n255\n";
  for (int i = 0; i < w * h; ++i) out.put(static_cast<char>(value));
}

GrayImage ramp(int w, int h) {
  std::vector<double> px(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) px[y * w + x] = static_cast<double>(y * w + x) / (w * h - 1);
  return GrayImage(w, h, std::move(px));
}

}  // namespace

TEST(GrayImage, RejectsOutOfRangeAndNan) {
  EXPECT_THROW(GrayImage(2, 1, std::vector<double>{0.0, 1.5}), UsageError);
  EXPECT_THROW(GrayImage(2, 1, std::vector<double>{0.0, std::nan("")}), UsageError);
  EXPECT_THROW(GrayImage(2, 2, std::vector<double>{0.0}), UsageError);
}

TEST(LoadImage, PgmExtremesAndMidGray) {
  TempDir dir;
  write_pgm8(dir / "white.pgm", 3, 2, 255);
  write_pgm8(dir / "black.pgm", 3, 2, 0);
  write_pgm8(dir / "mid.pgm", 1, 1, 128);
  const auto white = load_image(dir / "white.pgm");
  const auto black = load_image(dir / "black.pgm");
  for (double v : white.pixels()) EXPECT_EQ(v, 1.0);
  for (double v : black.pixels()) EXPECT_EQ(v, 0.0);
  EXPECT_NEAR(load_image(dir / "mid.pgm").at(0, 0), 0.50196, 1e-5);
  EXPECT_DOUBLE_EQ(load_image(dir / "mid.pgm").at(0, 0), 128.0 / 255.0);
}

TEST(LoadImage, AsciiPgmAndSixteenBit) {
  TempDir dir;
  {
    std::ofstream out(dir / "a.pgm");
    out << "P2\n# comment\n2 1\n1000\n0 1000\n";
  }
  const auto img = load_image(dir / "a.pgm");
  EXPECT_EQ(img.at(0, 0), 0.0);
  EXPECT_EQ(img.at(1, 0), 1.0);

  const auto src = ramp(7, 5);
  save_pgm(src, dir / "b.pgm", 16);
  const auto back = load_image(dir / "b.pgm");
  for (std::size_t i = 0; i < src.size(); ++i) EXPECT_NEAR(back.pixels()[i], src.pixels()[i], 0.5 / 65535 + 1e-15);
}

TEST(LoadImage, PngRoundTrips) {
  TempDir dir;
  const auto src = ramp(9, 4);
  save_png8(src, dir / "a.png");
  const auto back8 = load_image(dir / "a.png");
  for (std::size_t i = 0; i < src.size(); ++i) {
    EXPECT_DOUBLE_EQ(back8.pixels()[i], std::round(src.pixels()[i] * 255.0) / 255.0);
  }
  std::vector<std::uint16_t> raw = {0, 65535, 32768, 1};
  save_png16(2, 2, raw, dir / "b.png");
  const auto back16 = load_image(dir / "b.png");
  EXPECT_EQ(back16.at(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(back16.at(0, 1), 32768.0 / 65535.0);
}

TEST(LoadImage, ColourAndGarbageAreReported) {
  TempDir dir;
  RgbImage rgb(2, 2);
  save_png_rgb(rgb, dir / "c.png");
  try {
    load_image(dir / "c.png");
    FAIL() << "colour PNG accepted";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::kUnsupported);
  }
  {
    std::ofstream out(dir / "c.ppm", std::ios::binary);
    out << "P6\n1 1\n255\n" << "abc";
  }
  EXPECT_THROW(load_image(dir / "c.ppm"), FormatError);
  {
    std::ofstream out(dir / "junk.png");
    out << "not an image";
  }
  EXPECT_THROW(load_image(dir / "junk.png"), FormatError);
  EXPECT_THROW(load_image(dir / "missing.png"), IoError);
}

TEST(CenterCrop, DefaultWindow) {
  const auto img = ramp(1000, 1200);
  const auto out = center_crop(img, 800, 1000);
  ASSERT_EQ(out.width(), 800);
  ASSERT_EQ(out.height(), 1000);
  EXPECT_EQ(out.at(0, 0), img.at(100, 100));
  EXPECT_EQ(out.at(799, 999), img.at(899, 1099));
}

TEST(CenterCrop, IdentityAndOddMargins) {
  const auto img = ramp(5, 5);
  EXPECT_EQ(center_crop(img, 5, 5), img);
  const auto c = center_crop(img, 2, 2);
  // Margin 3 per axis: one pixel before, two after.
  EXPECT_EQ(c.at(0, 0), img.at(1, 1));
  EXPECT_EQ(c.at(1, 0), img.at(2, 1));
  EXPECT_EQ(c.at(0, 1), img.at(1, 2));
  EXPECT_EQ(c.at(1, 1), img.at(2, 2));
  EXPECT_THROW(center_crop(img, 6, 2), UsageError);
}

TEST(CenterCrop, CropOfCropIsCrop) {
  const auto img = burnsight::testing::random_image(31, 27, 3);
  EXPECT_EQ(center_crop(center_crop(img, 12, 9), 12, 9), center_crop(img, 12, 9));
}

TEST(ResizeBilinear, ConstantIdentityAndHandCase) {
  const GrayImage half(37, 53, 0.5);
  const auto big = resize_bilinear(half, 224, 224);
  for (double v : big.pixels()) EXPECT_DOUBLE_EQ(v, 0.5);

  const auto img = burnsight::testing::random_image(19, 11, 7);
  const auto same = resize_bilinear(img, 19, 11);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(same.pixels()[i], img.pixels()[i], 1e-12);

  const GrayImage two(2, 1, std::vector<double>{0.0, 1.0});
  const auto three = resize_bilinear(two, 3, 1);
  EXPECT_NEAR(three.at(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(three.at(1, 0), 0.5, 1e-15);
  EXPECT_NEAR(three.at(2, 0), 1.0, 1e-15);
}

TEST(ResizeBilinear, OutputStaysInUnitRange) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto img = burnsight::testing::random_image(13 + s, 7 + 2 * s, s);
    const auto out = resize_bilinear(img, 29, 5 + s);
    for (double v : out.pixels()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Preprocess, Shapes) {
  EXPECT_EQ(preprocess(GrayImage(1000, 1200, 0.2)).width(), 224);
  const auto out = preprocess(GrayImage(900, 1100, 0.2));
  EXPECT_EQ(out.width(), 224);
  EXPECT_EQ(out.height(), 224);
  EXPECT_THROW(preprocess(GrayImage(100, 300, 0.2)), UsageError);
}

TEST(Preprocess, IdempotentOnModelSizedInput) {
  const auto img = burnsight::testing::random_image(224, 224, 11);
  const auto once = preprocess(img);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(once.pixels()[i], img.pixels()[i], 1e-12);
  const auto twice = preprocess(once);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(twice.pixels()[i], once.pixels()[i], 1e-12);
}

TEST(Manifest, ParsesQuotedPathsAndChecksRules) {
  TempDir dir;
  {
    std::ofstream out(dir / "m.csv");
    out << "path,label,split\n\"a,1.png\",full_thickness,train\nb.png,partial_thickness,val\nc.png,unburnt,test\n";
  }
  const auto m = load_manifest(dir / "m.csv");
  ASSERT_EQ(m.entries.size(), 3u);
  EXPECT_EQ(m.entries[0].path, "a,1.png");
  EXPECT_EQ(m.resolve(m.entries[1]), dir.path() / "b.png");
  EXPECT_EQ(m.indices(Split::kTest), std::vector<std::size_t>{2});
  EXPECT_THROW(require_all_labels_in_train(m), UsageError);

  save_manifest(m, dir / "copy.csv");
  EXPECT_EQ(load_manifest(dir / "copy.csv").entries, m.entries);

  {
    std::ofstream out(dir / "dup.csv");
    out << "path,label,split\na.png,unburnt,train\na.png,unburnt,test\n";
  }
  EXPECT_THROW(load_manifest(dir / "dup.csv"), Error);
  {
    std::ofstream out(dir / "bad.csv");
    out << "path,label,split\na.png,burnt,train\n";
  }
  EXPECT_THROW(load_manifest(dir / "bad.csv"), Error);
  {
    std::ofstream out(dir / "hdr.csv");
    out << "file,label,split\na.png,unburnt,train\n";
  }
  EXPECT_THROW(load_manifest(dir / "hdr.csv"), Error);
}

TEST(Synth, CountsAndDeterminism) {
  TempDir a, b;
  SynthConfig cfg;
  cfg.per_class_count = 4;
  cfg.image_size = 32;
  cfg.seed = 5;
  cfg.test_per_class = 1;
  const auto m = generate_synthetic_dataset(cfg, a.path());
  EXPECT_EQ(m.entries.size(), 12u);
  EXPECT_EQ(load_manifest(a / "manifest.csv").entries.size(), 12u);
  EXPECT_EQ(m.indices(Split::kTest).size(), 3u);
  generate_synthetic_dataset(cfg, b.path());
  for (const auto& e : m.entries) {
    EXPECT_EQ(burnsight::testing::file_bytes(a.path() / e.path), burnsight::testing::file_bytes(b.path() / e.path));
  }
  EXPECT_EQ(burnsight::testing::file_bytes(a / "manifest.csv"), burnsight::testing::file_bytes(b / "manifest.csv"));
}

TEST(Synth, HundredPerClassGivesThreeHundredRows) {
  TempDir dir;
  SynthConfig cfg;
  cfg.per_class_count = 100;
  cfg.image_size = 32;
  const auto m = generate_synthetic_dataset(cfg, dir.path());
  EXPECT_EQ(m.entries.size(), 300u);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "images")) files += e.is_regular_file();
  EXPECT_EQ(files, 300u);
}

TEST(Synth, FineGrainHasHigherGlcmContrast) {
  SpeckleParams fine{1.0, 1, 0.5};
  SpeckleParams coarse{1.0, 4, 0.5};
  texture::GlcmConfig cfg;
  const auto contrast = texture::FeatureSelection::of({texture::HaralickFeature::kContrast});
  double fine_sum = 0, coarse_sum = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    fine_sum += texture::texture_vector(synthesize_speckle(fine, 64, s), cfg, contrast)[0];
    coarse_sum += texture::texture_vector(synthesize_speckle(coarse, 64, 1000 + s), cfg, contrast)[0];
  }
  EXPECT_GT(fine_sum / 100, coarse_sum / 100);
}

TEST(Synth, RejectsBadConfig) {
  SynthConfig cfg;
  cfg.per_class_count = 0;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg.per_class_count = 10;
  cfg.image_size = 16;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg.image_size = 32;
  cfg.test_per_class = 11;
  EXPECT_THROW(cfg.validate(), UsageError);
}

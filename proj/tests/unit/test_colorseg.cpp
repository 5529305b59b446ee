#include <gtest/gtest.h>

#include <random>

#include "arcjet/colorseg.hpp"
#include "arcjet/error.hpp"
#include "support/fixture.hpp"
#include "support/oracles.hpp"

using namespace arcjet;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no arcjet::Error thrown";
  return ErrorCode::UsageError;
}

double hue_distance(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, 360.0 - d);
}

PixelClassMask random_mask(int w, int h, double p, std::mt19937_64& rng) {
  PixelClassMask m(w, h);
  std::bernoulli_distribution on(p);
  for (auto& l : m.labels) l = on(rng) ? PixelClass::Sample : PixelClass::Background;
  return m;
}

std::vector<int> as_ints(const PixelClassMask& m) {
  std::vector<int> out;
  for (auto l : m.labels) out.push_back(static_cast<int>(l));
  return out;
}

}  // namespace

TEST(Hsv, MatchesHexconeOracleOnGrid) {
  for (int r = 0; r < 256; r += 3) {
    for (int g = 0; g < 256; g += 3) {
      for (int b = 0; b < 256; b += 3) {
        const Hsv got = rgb_to_hsv(r, g, b);
        const oracle::Hsv want = oracle::rgb_to_hsv(r, g, b);
        ASSERT_NEAR(hue_distance(got.h, want.h), 0.0, 1e-9) << r << "," << g << "," << b;
        ASSERT_NEAR(got.s, want.s, 1e-12);
        ASSERT_NEAR(got.v, want.v, 1e-12);
      }
    }
  }
}

TEST(Hsv, RangesAndAchromatic) {
  for (int i = 0; i < 256; ++i) {
    const Hsv g = rgb_to_hsv(i, i, i);
    EXPECT_EQ(g.h, 0.0);
    EXPECT_EQ(g.s, 0.0);
  }
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> c(0, 255);
  for (int i = 0; i < 20000; ++i) {
    const Hsv p = rgb_to_hsv(c(rng), c(rng), c(rng));
    EXPECT_TRUE(p.h >= 0.0 && p.h < 360.0);
    EXPECT_TRUE(p.s >= 0.0 && p.s <= 1.0);
    EXPECT_TRUE(p.v >= 0.0 && p.v <= 1.0);
  }
}

TEST(Hsv, RoundTripWithinOneLevel) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> c(0, 255);
  for (int i = 0; i < 100000; ++i) {
    const int r = c(rng), g = c(rng), b = c(rng);
    const auto back = hsv_to_rgb(rgb_to_hsv(r, g, b));
    ASSERT_LE(std::abs(back[0] - r), 1);
    ASSERT_LE(std::abs(back[1] - g), 1);
    ASSERT_LE(std::abs(back[2] - b), 1);
  }
}

TEST(HsvRange, HueWrapsAround) {
  HsvRange red{340, 20, 0, 1, 0, 1};
  EXPECT_TRUE(red.contains({350, 0.5, 0.5}));
  EXPECT_TRUE(red.contains({10, 0.5, 0.5}));
  EXPECT_TRUE(red.contains({0, 0.5, 0.5}));
  EXPECT_FALSE(red.contains({180, 0.5, 0.5}));
  HsvRange bad{0, 360, 0, 1, 0, 1};
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::ConfigInvalid);
}

TEST(Classify, ShockTakesPrecedenceAndEdgeNeverProduced) {
  RgbImage img(4, 4);
  const std::uint8_t px[4][3] = {{255, 0, 0}, {0, 255, 0}, {0, 0, 255}, {0, 0, 0}};
  for (int x = 0; x < 4; ++x) std::copy(px[x], px[x] + 3, img.at(x, 0));
  SegmentationConfig cfg;
  cfg.method = SegmentationMethod::Hsv;
  cfg.sample_ranges = {{340, 180, 0.5, 1, 0.5, 1}};  // red through green
  cfg.shock_ranges = {{90, 150, 0.5, 1, 0.5, 1}};    // green
  const PixelClassMask m = classify(img, Roi::full(4, 4), cfg);
  EXPECT_EQ(m.at(0, 0), PixelClass::Sample);
  EXPECT_EQ(m.at(1, 0), PixelClass::Shock);
  EXPECT_EQ(m.at(2, 0), PixelClass::Background);
  EXPECT_EQ(m.at(3, 0), PixelClass::Background);
  EXPECT_EQ(m.count(PixelClass::SampleEdge), 0u);
}

TEST(Classify, MaskMatchesRoiAndCarriesOffset) {
  const SyntheticVideo v = testfx::default_video();
  const RgbImage img = v.source.get_frame(50).image;
  const Roi roi{100, 50, 200, 150};
  const PixelClassMask m = classify_auto_hsv(img, roi);
  EXPECT_EQ(m.width, 200);
  EXPECT_EQ(m.height, 150);
  EXPECT_EQ(m.roi_x, 100);
  EXPECT_EQ(m.roi_y, 50);
  EXPECT_EQ(m.labels.size(), 200u * 150u);
  EXPECT_EQ(m.count(PixelClass::SampleEdge), 0u);
}

TEST(Classify, RoiOutsideFrameRejected) {
  const RgbImage img(32, 32);
  EXPECT_EQ(code_of([&] { classify_gray(img, {20, 0, 16, 16}, 128); }), ErrorCode::RoiOutOfBounds);
  EXPECT_EQ(code_of([&] { classify_gray(img, {-1, 0, 16, 16}, 128); }), ErrorCode::RoiOutOfBounds);
}

TEST(Classify, HsvWithoutSampleRangesRejected) {
  SegmentationConfig cfg;
  cfg.method = SegmentationMethod::Hsv;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::EmptyRangeList);
  EXPECT_EQ(code_of([&] { classify(RgbImage(8, 8), Roi::full(8, 8), cfg); }), ErrorCode::EmptyRangeList);
}

TEST(Classify, GrayThresholdInclusive) {
  RgbImage img(4, 4);
  const int levels[3] = {127, 128, 129};
  for (int x = 0; x < 3; ++x) std::fill(img.at(x, 0), img.at(x, 0) + 3, levels[x]);
  const PixelClassMask m = classify_gray(img, Roi::full(4, 4), 128);
  EXPECT_EQ(m.at(0, 0), PixelClass::Background);
  EXPECT_EQ(m.at(1, 0), PixelClass::Sample);
  EXPECT_EQ(m.at(2, 0), PixelClass::Sample);
  EXPECT_EQ(code_of([&] { classify_gray(img, Roi::full(4, 4), 256); }), ErrorCode::ConfigInvalid);
}

TEST(Classify, AutoHsvFindsSampleAndShockOnFixture) {
  const SynthVideoConfig cfg;
  const SyntheticVideo v = testfx::default_video();
  const RgbImage img = v.source.get_frame(50).image;
  const PixelClassMask m = classify_auto_hsv(img, Roi::full(img.width, img.height));
  const int y = static_cast<int>(cfg.center_y());
  const int face = static_cast<int>(cfg.edge_x_at(50));
  EXPECT_EQ(m.at(face - 10, y), PixelClass::Sample);
  const double shock_x = *v.truth.per_frame[50].shock_x[static_cast<std::size_t>(y)];
  int shock_hits = 0;
  for (int dx = -2; dx <= 2; ++dx) shock_hits += m.at(static_cast<int>(shock_x) + dx, y) == PixelClass::Shock;
  EXPECT_GE(shock_hits, 2);
  EXPECT_EQ(m.at(5, 5), PixelClass::Background);
  const PixelClassMask off = classify_auto_hsv(v.source.get_frame(5).image, Roi::full(img.width, img.height));
  EXPECT_EQ(off.count(PixelClass::Background), off.labels.size());
}

TEST(Components, SizesMatchUnionFindOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const PixelClassMask m = random_mask(64, 64, 0.45 + 0.01 * trial, rng);
    auto got = component_sizes(m, PixelClass::Sample);
    std::sort(got.rbegin(), got.rend());
    EXPECT_EQ(got, oracle::component_sizes(as_ints(m), 64, 64, 1)) << "trial " << trial;
  }
}

TEST(Components, LargestComponentKeepsOnlyLargest) {
  std::mt19937_64 rng(9);
  const PixelClassMask m = random_mask(64, 64, 0.5, rng);
  const PixelClassMask kept = largest_component(m, PixelClass::Sample);
  const auto before = oracle::component_sizes(as_ints(m), 64, 64, 1);
  const auto after = oracle::component_sizes(as_ints(kept), 64, 64, 1);
  ASSERT_EQ(after.size(), 1u);
  EXPECT_EQ(after[0], before[0]);
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    if (kept.labels[i] == PixelClass::Sample) EXPECT_EQ(m.labels[i], PixelClass::Sample);
  }
  EXPECT_EQ(largest_component(kept, PixelClass::Sample), kept);
}

TEST(Components, TieGoesToFirstInRowMajorOrder) {
  PixelClassMask m(6, 3);
  m.at(4, 0) = m.at(5, 0) = PixelClass::Sample;  // first met in row-major order
  m.at(0, 2) = m.at(1, 2) = PixelClass::Sample;
  const PixelClassMask kept = largest_component(m, PixelClass::Sample);
  EXPECT_EQ(kept.at(4, 0), PixelClass::Sample);
  EXPECT_EQ(kept.at(0, 2), PixelClass::Background);
}

TEST(Components, OtherClassesUntouched) {
  PixelClassMask m(5, 1);
  m.at(0, 0) = PixelClass::Sample;
  m.at(1, 0) = PixelClass::Shock;
  m.at(3, 0) = m.at(4, 0) = PixelClass::Sample;
  const PixelClassMask kept = largest_component(m, PixelClass::Sample);
  EXPECT_EQ(kept.at(0, 0), PixelClass::Background);
  EXPECT_EQ(kept.at(1, 0), PixelClass::Shock);
  EXPECT_EQ(kept.at(3, 0), PixelClass::Sample);
}

namespace {

struct HalfSplit : Segmenter {
  PixelClassMask classify(const RgbImage&, const Roi& roi) const override {
    PixelClassMask m(roi.w, roi.h, roi.x, roi.y);
    for (int y = 0; y < roi.h; ++y) {
      for (int x = 0; x < roi.w / 2; ++x) m.at(x, y) = PixelClass::Sample;
    }
    return m;
  }
};

}  // namespace

TEST(Plugin, RegisteredSegmenterIsDispatched) {
  register_segmenter("half-split", std::make_shared<HalfSplit>());
  SegmentationConfig cfg;
  cfg.method = SegmentationMethod::Plugin;
  cfg.plugin = "half-split";
  const PixelClassMask m = classify(RgbImage(8, 8), Roi::full(8, 8), cfg);
  EXPECT_EQ(m.count(PixelClass::Sample), 32u);
  cfg.plugin = "nope";
  EXPECT_EQ(code_of([&] { classify(RgbImage(8, 8), Roi::full(8, 8), cfg); }), ErrorCode::PluginMissing);
}

TEST(PixelClassCodes, StableNumericValues) {
  EXPECT_EQ(static_cast<int>(PixelClass::Background), 0);
  EXPECT_EQ(static_cast<int>(PixelClass::Sample), 1);
  EXPECT_EQ(static_cast<int>(PixelClass::SampleEdge), 2);
  EXPECT_EQ(static_cast<int>(PixelClass::Shock), 3);
}

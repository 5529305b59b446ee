#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <iterator>

#include "arcjet/error.hpp"
#include "arcjet/frames.hpp"
#include "support/fixture.hpp"

using namespace arcjet;
namespace fs = std::filesystem;

namespace {

void write_manifest(const fs::path& dir, const nlohmann::json& j) {
  std::ofstream os(dir / "manifest.json");
  os << j.dump();
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no arcjet::Error thrown";
  return ErrorCode::UsageError;
}

SynthVideoConfig tiny_config() {
  SynthVideoConfig cfg;
  cfg.frame_count = 12;
  cfg.width = 96;
  cfg.height = 64;
  cfg.initial_edge_x = 60;
  cfg.sample_radius = 20;
  cfg.shock_standoff0 = 8;
  cfg.first_on = 3;
  cfg.last_on = 9;
  return cfg;
}

}  // namespace

TEST(FrameSource, ThreeFrameManifestEchoesMetadata) {
  const fs::path dir = testfx::scratch("three");
  std::vector<RgbImage> frames(3, RgbImage(16, 12, 40));
  write_frame_sequence(dir, frames, 30.0);
  const FrameSource src = FrameSource::open(dir / "manifest.json");
  EXPECT_EQ(src.frame_count(), 3);
  EXPECT_DOUBLE_EQ(src.fps(), 30.0);
  EXPECT_EQ(src.width(), 16);
  EXPECT_EQ(src.height(), 12);
}

TEST(FrameSource, GapInIndicesIsMalformed) {
  const fs::path dir = testfx::scratch("gap");
  png::write_file(dir / "a.png", RgbImage(8, 8));
  png::write_file(dir / "b.png", RgbImage(8, 8));
  write_manifest(dir, {{"fps", 30}, {"width", 8}, {"height", 8},
                       {"frames", {{{"index", 0}, {"file", "a.png"}}, {{"index", 2}, {"file", "b.png"}}}}});
  EXPECT_EQ(code_of([&] { FrameSource::open(dir / "manifest.json"); }), ErrorCode::MalformedManifest);
}

TEST(FrameSource, MissingManifestAndMissingKeys) {
  const fs::path dir = testfx::scratch("missing");
  EXPECT_EQ(code_of([&] { FrameSource::open(dir / "nope.json"); }), ErrorCode::MissingManifest);
  write_manifest(dir, {{"width", 8}, {"height", 8}, {"frames", nlohmann::json::array()}});
  EXPECT_EQ(code_of([&] { FrameSource::open(dir / "manifest.json"); }), ErrorCode::MalformedManifest);
}

TEST(FrameSource, WrongFrameSizeReportedOnAccess) {
  const fs::path dir = testfx::scratch("dims");
  png::write_file(dir / "a.png", RgbImage(16, 16));
  png::write_file(dir / "b.png", RgbImage(8, 8));
  write_manifest(dir, {{"fps", 10}, {"width", 16}, {"height", 16}, {"frames", {"a.png", "b.png"}}});
  const FrameSource src = FrameSource::open(dir / "manifest.json");
  EXPECT_NO_THROW(src.get_frame(0));
  EXPECT_EQ(code_of([&] { src.get_frame(1); }), ErrorCode::DimensionMismatch);
}

TEST(FrameSource, CorruptPngIsDecodeFailure) {
  const fs::path dir = testfx::scratch("corrupt");
  {
    std::ofstream os(dir / "a.png", std::ios::binary);
    os << "not a png at all";
  }
  write_manifest(dir, {{"fps", 10}, {"width", 8}, {"height", 8}, {"frames", {"a.png"}}});
  const FrameSource src = FrameSource::open(dir / "manifest.json");
  EXPECT_EQ(code_of([&] { src.get_frame(0); }), ErrorCode::DecodeFailure);
}

TEST(FrameSource, GeneratorRoundTripAndBounds) {
  const SyntheticVideo v = testfx::default_video();
  EXPECT_EQ(v.source.frame_count(), 100);
  const Frame f0 = v.source.get_frame(0);
  EXPECT_EQ(f0.index, 0);
  EXPECT_DOUBLE_EQ(f0.timestamp_s, 0.0);
  EXPECT_EQ(f0.image.pixels.size(), std::size_t(512) * 384 * 3);
  EXPECT_DOUBLE_EQ(v.source.get_frame(45).timestamp_s, 45 / 30.0);
  EXPECT_EQ(code_of([&] { v.source.get_frame(100); }), ErrorCode::IndexOutOfRange);
  EXPECT_EQ(code_of([&] { v.source.get_frame(-1); }), ErrorCode::IndexOutOfRange);
}

TEST(FrameSource, RepeatedReadsAreIdentical) {
  const SyntheticVideo v = testfx::default_video();
  EXPECT_EQ(v.source.get_frame(50).image, v.source.get_frame(50).image);
}

TEST(Synthetic, SampleInteriorMatchesConfiguredBrightness) {
  const SynthVideoConfig cfg;
  const SyntheticVideo v = testfx::default_video();
  const Frame f = v.source.get_frame(50);
  const int x = static_cast<int>(cfg.edge_x_at(50)) - 20;
  const int y = static_cast<int>(cfg.center_y());
  const double tint[3] = {1.0, 0.9, 0.75};
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(f.image.at(x, y)[c], cfg.sample_brightness * tint[c], 3 * cfg.noise_sigma + 0.5) << "channel " << c;
  }
}

TEST(Synthetic, OffFramesAreBackgroundAndNoise) {
  const SynthVideoConfig cfg;
  const SyntheticVideo v = testfx::default_video();
  for (int i : {0, 10, 19, 81, 99}) {
    const Frame f = v.source.get_frame(i);
    double sum = 0.0;
    for (auto p : f.image.pixels) sum += p;
    EXPECT_NEAR(sum / f.image.pixels.size(), cfg.background_level, 0.1) << "frame " << i;
    EXPECT_TRUE(v.truth.per_frame[static_cast<std::size_t>(i)].edge_x.empty());
  }
}

TEST(Synthetic, EdgeArithmetic) {
  SynthVideoConfig cfg;
  cfg.initial_edge_x = 300;
  cfg.recession_rate = 0.5;
  cfg.first_on = 20;
  const auto gt = synthetic_ground_truth(cfg, 60);
  const auto row = static_cast<std::size_t>(cfg.center_y());
  ASSERT_TRUE(gt.edge_x[row].has_value());
  EXPECT_DOUBLE_EQ(*gt.edge_x[row], 280.0);
  EXPECT_DOUBLE_EQ(*gt.shock_x[row], 280.0 + cfg.shock_standoff0 + cfg.shock_standoff_rate * 40);
}

TEST(Synthetic, ZeroRateKeepsEdgeConstant) {
  SynthVideoConfig cfg;
  cfg.recession_rate = 0.0;
  const auto row = static_cast<std::size_t>(cfg.center_y());
  for (int i = cfg.first_on; i <= cfg.last_on; ++i) {
    EXPECT_DOUBLE_EQ(*synthetic_ground_truth(cfg, i).edge_x[row], cfg.initial_edge_x);
  }
}

TEST(Synthetic, LeftFlowRecedesTowardPlusX) {
  const SynthVideoConfig cfg = testfx::left_config();
  EXPECT_DOUBLE_EQ(cfg.edge_x_at(60), 211.0 + 0.5 * 40);
  const auto gt = synthetic_ground_truth(cfg, 60);
  const auto row = static_cast<std::size_t>(cfg.center_y());
  EXPECT_LT(*gt.shock_x[row], *gt.edge_x[row]);
}

TEST(Synthetic, RateProfileIsPiecewiseLinear) {
  const SynthVideoConfig cfg = testfx::three_regime_config();
  EXPECT_NEAR(cfg.recession_at(20), 0.0, 1e-9);
  EXPECT_NEAR(cfg.recession_at(40), 20 * 0.2, 1e-9);
  EXPECT_NEAR(cfg.recession_at(60), 20 * 0.2 + 20 * 0.8, 1e-9);
  EXPECT_NEAR(cfg.recession_at(80), 20 * 0.2 + 20 * 0.8 + 20 * 0.4, 1e-9);
}

TEST(Synthetic, GroundTruthInsideFrame) {
  const SyntheticVideo v = testfx::default_video();
  const double w = v.source.width();
  for (const auto& f : v.truth.per_frame) {
    for (const auto& x : f.edge_x) {
      if (x) EXPECT_TRUE(*x >= 0 && *x <= w - 1);
    }
    for (const auto& x : f.shock_x) {
      if (x) EXPECT_TRUE(*x >= 0 && *x <= w - 1);
    }
  }
}

TEST(Synthetic, GenerationIsByteDeterministic) {
  const SynthVideoConfig cfg = tiny_config();
  const fs::path a = testfx::scratch("det-a");
  const fs::path b = testfx::scratch("det-b");
  generate_synthetic_video(cfg, a);
  generate_synthetic_video(cfg, b);
  for (const auto& entry : fs::directory_iterator(a)) {
    const fs::path other = b / entry.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
  }
}

TEST(Synthetic, ConfigValidation) {
  SynthVideoConfig cfg = tiny_config();
  cfg.first_on = 10;
  cfg.last_on = 5;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::ConfigInvalid);
  cfg = tiny_config();
  cfg.last_on = cfg.frame_count;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::ConfigInvalid);
  cfg = tiny_config();
  cfg.recession_rate = 20.0;  // face would leave the frame
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::ConfigInvalid);
  cfg = tiny_config();
  cfg.recession_rate = -1;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::ConfigInvalid);
}

TEST(Synthetic, ConfigJsonRoundTrip) {
  SynthVideoConfig cfg = testfx::three_regime_config();
  cfg.flow = FlowDirection::Left;
  cfg.seed = 77;
  const nlohmann::json j = cfg;
  const SynthVideoConfig back = j.get<SynthVideoConfig>();
  EXPECT_EQ(nlohmann::json(back), j);
}

TEST(Png, EncodeDecodeRoundTrip) {
  RgbImage img(13, 7);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = static_cast<std::uint8_t>(i * 37 % 256);
  const auto bytes = png::encode(img);
  EXPECT_EQ(png::decode(bytes), img);
}

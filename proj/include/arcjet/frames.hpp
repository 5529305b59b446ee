#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "arcjet/geometry.hpp"
#include "arcjet/image.hpp"

namespace arcjet {

struct Frame {
  int index = 0;
  double timestamp_s = 0.0;
  RgbImage image;

  int width() const { return image.width; }
  int height() const { return image.height; }
};

/// Indexed, lazily decoded sequence of PNG frames described by a JSON
/// manifest. Immutable after open; get_frame is safe to call concurrently.
class FrameSource {
 public:
  /// Parses and validates the manifest. Checks that every listed file exists;
  /// pixel data is not touched until get_frame.
  static FrameSource open(const std::filesystem::path& manifest_path);

  const std::filesystem::path& manifest_path() const { return manifest_path_; }
  double fps() const { return fps_; }
  int frame_count() const { return static_cast<int>(files_.size()); }
  int width() const { return width_; }
  int height() const { return height_; }
  const std::filesystem::path& frame_path(int index) const;

  Frame get_frame(int index) const;

 private:
  std::filesystem::path manifest_path_;
  double fps_ = 0.0;
  int width_ = 0;
  int height_ = 0;
  std::vector<std::filesystem::path> files_;
};

/// Writes `frames` as numbered PNGs plus manifest.json into `dir`.
FrameSource write_frame_sequence(const std::filesystem::path& dir, const std::vector<RgbImage>& frames, double fps);

// ---------------------------------------------------------------------------
// Synthetic arcjet video
// ---------------------------------------------------------------------------

/// Piecewise recession: `rate` px/frame applies from `from_frame` (absolute
/// index) until the next segment.
struct RateSegment {
  int from_frame = 0;
  double rate = 0.0;
};

struct SynthVideoConfig {
  int frame_count = 100;
  int width = 512;
  int height = 384;
  double fps = 30.0;
  FlowDirection flow = FlowDirection::Right;

  double initial_edge_x = 300.0;
  double recession_rate = 0.5;
  std::vector<RateSegment> rate_profile;  // overrides recession_rate when non-empty
  double sample_radius = 100.0;
  double shock_standoff0 = 25.0;
  double shock_standoff_rate = 0.05;
  double shock_radius_factor = 4.0;  // shock curvature radius / sample radius
  double shock_thickness = 4.0;

  int first_on = 20;
  int last_on = 80;

  int background_level = 20;
  int sample_brightness = 230;
  int shock_brightness = 250;
  int plasma_glow = 20;     // peak additive violet glow at the upstream frame border
  int ignition_gain = 30;   // additive flash on the first ignition_frames ON frames
  int ignition_frames = 2;
  double noise_sigma = 3.0;
  std::uint64_t seed = 1;

  /// Throws Error{ConfigInvalid} when an invariant is broken.
  void validate() const;

  double center_y() const { return height / 2; }
  /// Cumulative recession (px) at frame `index`; zero outside the ON window start.
  double recession_at(int index) const;
  double edge_x_at(int index) const;
  double standoff_at(int index) const;
  bool is_on(int index) const { return index >= first_on && index <= last_on; }
};

void to_json(nlohmann::json& j, const SynthVideoConfig& cfg);
void from_json(const nlohmann::json& j, SynthVideoConfig& cfg);

struct GroundTruthFrame {
  int index = 0;
  std::vector<std::optional<double>> edge_x;   // one entry per row, empty when OFF
  std::vector<std::optional<double>> shock_x;
};

struct GroundTruth {
  int first_on = 0;
  int last_on = 0;
  double center_y = 0.0;
  FlowDirection flow = FlowDirection::Right;
  std::vector<GroundTruthFrame> per_frame;
};

void to_json(nlohmann::json& j, const GroundTruth& gt);
void from_json(const nlohmann::json& j, GroundTruth& gt);

/// Renders one frame (deterministic in cfg.seed and index).
RgbImage render_synthetic_frame(const SynthVideoConfig& cfg, int index);
GroundTruthFrame synthetic_ground_truth(const SynthVideoConfig& cfg, int index);

struct SyntheticVideo {
  FrameSource source;
  GroundTruth truth;
};

/// Writes frames, manifest.json and ground_truth.json into `dir`.
SyntheticVideo generate_synthetic_video(const SynthVideoConfig& cfg, const std::filesystem::path& dir);

}  // namespace arcjet

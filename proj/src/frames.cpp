#include "arcjet/frames.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "arcjet/error.hpp"

namespace arcjet {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(FlowDirection flow) { return flow == FlowDirection::Left ? "left" : "right"; }

FlowDirection parse_flow(std::string_view text) {
  if (text == "left" || text == "LEFT") return FlowDirection::Left;
  if (text == "right" || text == "RIGHT") return FlowDirection::Right;
  throw Error(ErrorCode::ConfigInvalid, "flow direction must be left or right, got '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// FrameSource
// ---------------------------------------------------------------------------

namespace {

std::string frame_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "f%06d.png", index);
  return buf;
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "short write " + path.string());
}

}  // namespace

FrameSource FrameSource::open(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::MissingManifest, manifest_path.string());

  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedManifest, manifest_path.string() + ": " + e.what());
  }
  auto require = [&](const char* key) -> const json& {
    if (!j.is_object() || !j.contains(key)) {
      throw Error(ErrorCode::MalformedManifest, manifest_path.string() + ": missing key '" + key + "'");
    }
    return j.at(key);
  };

  FrameSource src;
  src.manifest_path_ = manifest_path;
  try {
    src.fps_ = require("fps").get<double>();
    src.width_ = require("width").get<int>();
    src.height_ = require("height").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedManifest, manifest_path.string() + ": " + e.what());
  }
  if (!(src.fps_ > 0.0)) throw Error(ErrorCode::MalformedManifest, "fps must be > 0");
  if (src.width_ < 8 || src.height_ < 8) throw Error(ErrorCode::MalformedManifest, "frames must be at least 8x8");

  const json& frames = require("frames");
  if (!frames.is_array() || frames.empty()) {
    throw Error(ErrorCode::MalformedManifest, "'frames' must be a non-empty array");
  }
  const fs::path base = manifest_path.parent_path();
  int expected = 0;
  for (const json& entry : frames) {
    std::string file;
    if (entry.is_string()) {
      file = entry.get<std::string>();
    } else if (entry.is_object() && entry.contains("index") && entry.contains("file")) {
      // Explicitly indexed entries must still be dense and ordered.
      if (!entry["index"].is_number_integer() || entry["index"].get<int>() != expected) {
        throw Error(ErrorCode::MalformedManifest, "frame indices must be dense 0..n-1; expected " +
                                                      std::to_string(expected) + ", got " + entry["index"].dump());
      }
      file = entry["file"].get<std::string>();
    } else {
      throw Error(ErrorCode::MalformedManifest, "bad frame entry " + entry.dump());
    }
    fs::path p = base / file;
    if (!fs::exists(p)) throw Error(ErrorCode::MalformedManifest, "listed frame does not exist: " + p.string());
    src.files_.push_back(std::move(p));
    ++expected;
  }
  return src;
}

const fs::path& FrameSource::frame_path(int index) const {
  if (index < 0 || index >= frame_count()) {
    throw Error(ErrorCode::IndexOutOfRange,
                std::to_string(index) + " not in [0," + std::to_string(frame_count()) + ")");
  }
  return files_[static_cast<std::size_t>(index)];
}

Frame FrameSource::get_frame(int index) const {
  const fs::path& p = frame_path(index);
  Frame f;
  f.index = index;
  f.timestamp_s = index / fps_;
  f.image = png::read_file(p);
  if (f.image.width != width_ || f.image.height != height_) {
    throw Error(ErrorCode::DimensionMismatch, p.string() + " is " + std::to_string(f.image.width) + "x" +
                                                  std::to_string(f.image.height) + ", manifest declares " +
                                                  std::to_string(width_) + "x" + std::to_string(height_));
  }
  return f;
}

FrameSource write_frame_sequence(const fs::path& dir, const std::vector<RgbImage>& frames, double fps) {
  if (frames.empty()) throw Error(ErrorCode::ConfigInvalid, "no frames to write");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

  json manifest{{"fps", fps}, {"width", frames.front().width}, {"height", frames.front().height}};
  json list = json::array();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::string name = frame_file_name(static_cast<int>(i));
    png::write_file(dir / name, frames[i]);
    list.push_back(name);
  }
  manifest["frames"] = std::move(list);
  write_json_file(dir / "manifest.json", manifest);
  return FrameSource::open(dir / "manifest.json");
}

// ---------------------------------------------------------------------------
// Synthetic video
// ---------------------------------------------------------------------------

void SynthVideoConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::ConfigInvalid, why); };
  if (frame_count < 1) fail("frame_count must be >= 1");
  if (width < 8 || height < 8) fail("frame must be at least 8x8");
  if (!(fps > 0)) fail("fps must be > 0");
  if (!(first_on >= 0 && first_on <= last_on && last_on < frame_count)) {
    fail("need 0 <= first_on <= last_on < frame_count");
  }
  if (recession_rate < 0) fail("recession_rate must be >= 0");
  for (const auto& seg : rate_profile) {
    if (seg.rate < 0) fail("rate_profile rates must be >= 0");
  }
  if (!(sample_radius >= 2)) fail("sample_radius must be >= 2");
  if (!(shock_radius_factor >= 1)) fail("shock_radius_factor must be >= 1");
  for (int level : {background_level, sample_brightness, shock_brightness}) {
    if (level < 0 || level > 255) fail("brightness levels must be in 0..255");
  }
  if (noise_sigma < 0) fail("noise_sigma must be >= 0");
  if (initial_edge_x < 0 || initial_edge_x > width - 1) fail("initial_edge_x outside the frame");
  const double final_edge = edge_x_at(last_on);
  if (final_edge < 0 || final_edge > width - 1) fail("edge leaves the frame before last_on");
  if (center_y() - sample_radius < 0 || center_y() + sample_radius > height - 1) {
    fail("sample does not fit vertically");
  }
}

double SynthVideoConfig::recession_at(int index) const {
  if (index <= first_on) return 0.0;
  const int end = std::min(index, last_on);
  if (rate_profile.empty()) return recession_rate * (end - first_on);
  double total = 0.0;
  for (int k = first_on; k < end; ++k) {
    double rate = recession_rate;
    for (const auto& seg : rate_profile) {
      if (seg.from_frame <= k) rate = seg.rate;
    }
    total += rate;
  }
  return total;
}

double SynthVideoConfig::edge_x_at(int index) const {
  return initial_edge_x - upstream_sign(flow) * recession_at(index);
}

double SynthVideoConfig::standoff_at(int index) const {
  const int t = std::clamp(index, first_on, last_on) - first_on;
  return shock_standoff0 + shock_standoff_rate * t;
}

void to_json(json& j, const SynthVideoConfig& c) {
  json profile = json::array();
  for (const auto& s : c.rate_profile) profile.push_back({{"from_frame", s.from_frame}, {"rate", s.rate}});
  j = json{{"frame_count", c.frame_count},
           {"width", c.width},
           {"height", c.height},
           {"fps", c.fps},
           {"flow_direction", to_string(c.flow)},
           {"initial_edge_x", c.initial_edge_x},
           {"recession_rate", c.recession_rate},
           {"rate_profile", profile},
           {"sample_radius", c.sample_radius},
           {"shock_standoff0", c.shock_standoff0},
           {"shock_standoff_rate", c.shock_standoff_rate},
           {"shock_radius_factor", c.shock_radius_factor},
           {"shock_thickness", c.shock_thickness},
           {"on_window", {c.first_on, c.last_on}},
           {"background_level", c.background_level},
           {"sample_brightness", c.sample_brightness},
           {"shock_brightness", c.shock_brightness},
           {"plasma_glow", c.plasma_glow},
           {"ignition_gain", c.ignition_gain},
           {"ignition_frames", c.ignition_frames},
           {"noise_sigma", c.noise_sigma},
           {"seed", c.seed}};
}

void from_json(const json& j, SynthVideoConfig& c) {
  SynthVideoConfig d;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("frame_count", d.frame_count);
  get("width", d.width);
  get("height", d.height);
  get("fps", d.fps);
  if (j.contains("flow_direction")) d.flow = parse_flow(j.at("flow_direction").get<std::string>());
  get("initial_edge_x", d.initial_edge_x);
  get("recession_rate", d.recession_rate);
  if (j.contains("rate_profile")) {
    for (const auto& s : j.at("rate_profile")) d.rate_profile.push_back({s.at("from_frame"), s.at("rate")});
  }
  get("sample_radius", d.sample_radius);
  get("shock_standoff0", d.shock_standoff0);
  get("shock_standoff_rate", d.shock_standoff_rate);
  get("shock_radius_factor", d.shock_radius_factor);
  get("shock_thickness", d.shock_thickness);
  if (j.contains("on_window")) {
    d.first_on = j.at("on_window").at(0);
    d.last_on = j.at("on_window").at(1);
  }
  get("background_level", d.background_level);
  get("sample_brightness", d.sample_brightness);
  get("shock_brightness", d.shock_brightness);
  get("plasma_glow", d.plasma_glow);
  get("ignition_gain", d.ignition_gain);
  get("ignition_frames", d.ignition_frames);
  get("noise_sigma", d.noise_sigma);
  get("seed", d.seed);
  c = std::move(d);
}

namespace {

json optional_row(const std::vector<std::optional<double>>& row) {
  json out = json::array();
  for (const auto& v : row) out.push_back(v ? json(*v) : json(nullptr));
  return out;
}

std::vector<std::optional<double>> optional_row(const json& j) {
  std::vector<std::optional<double>> out;
  for (const auto& v : j) out.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
  return out;
}

// Geometry of one ON frame in pixel-centre coordinates (pixel i spans [i-0.5, i+0.5]).
struct Scene {
  int dir;             // upstream sign
  double face_x;       // flat leading face of the sample
  double disc_cx;      // sample disc centre (fixed: the back of the sample does not move)
  double cy;
  double radius;
  double shock_cx;     // shock circle centre
  double shock_r;
  double shock_inner;

  Scene(const SynthVideoConfig& cfg, int index)
      : dir(upstream_sign(cfg.flow)),
        face_x(cfg.edge_x_at(index)),
        disc_cx(cfg.initial_edge_x),
        cy(cfg.center_y()),
        radius(cfg.sample_radius),
        shock_r(cfg.shock_radius_factor * cfg.sample_radius),
        shock_inner(shock_r - cfg.shock_thickness) {
    const double shock_apex = face_x + dir * cfg.standoff_at(index);
    shock_cx = shock_apex - dir * shock_r;
  }

  bool in_sample(double x, double y) const {
    const double dx = x - disc_cx;
    const double dy = y - cy;
    return dir * (x - face_x) <= 0.0 && dx * dx + dy * dy <= radius * radius;
  }

  bool in_shock(double x, double y) const {
    const double dy = y - cy;
    if (std::abs(dy) > radius) return false;
    const double dx = x - shock_cx;
    if (dir * dx < 0) return false;
    const double r2 = dx * dx + dy * dy;
    return r2 <= shock_r * shock_r && r2 >= shock_inner * shock_inner;
  }

  // 1 sample, 2 shock, 0 background; the sample occludes the shock.
  int label(double x, double y) const { return in_sample(x, y) ? 1 : in_shock(x, y) ? 2 : 0; }

  std::optional<double> sample_edge(double y) const {
    const double dy = y - cy;
    if (std::abs(dy) > radius) return std::nullopt;
    const double half_width = std::sqrt(radius * radius - dy * dy);
    if (half_width <= std::abs(face_x - disc_cx)) return std::nullopt;
    return face_x;
  }

  std::optional<double> shock_edge(double y) const {
    const double dy = y - cy;
    if (std::abs(dy) > radius) return std::nullopt;
    return shock_cx + dir * std::sqrt(shock_r * shock_r - dy * dy);
  }
};

constexpr int kSuper = 8;

}  // namespace

GroundTruthFrame synthetic_ground_truth(const SynthVideoConfig& cfg, int index) {
  GroundTruthFrame gt;
  gt.index = index;
  if (!cfg.is_on(index)) return gt;
  Scene scene(cfg, index);
  gt.edge_x.resize(static_cast<std::size_t>(cfg.height));
  gt.shock_x.resize(static_cast<std::size_t>(cfg.height));
  auto inside = [&](std::optional<double> x) -> std::optional<double> {
    if (x && *x >= 0.0 && *x <= cfg.width - 1) return x;
    return std::nullopt;
  };
  for (int y = 0; y < cfg.height; ++y) {
    gt.edge_x[static_cast<std::size_t>(y)] = inside(scene.sample_edge(y));
    gt.shock_x[static_cast<std::size_t>(y)] = inside(scene.shock_edge(y));
  }
  return gt;
}

RgbImage render_synthetic_frame(const SynthVideoConfig& cfg, int index) {
  RgbImage img(cfg.width, cfg.height);
  std::vector<double> buf(static_cast<std::size_t>(cfg.width) * cfg.height * 3, cfg.background_level);
  auto px = [&](int x, int y) { return buf.data() + (static_cast<std::size_t>(y) * cfg.width + x) * 3; };

  if (cfg.is_on(index)) {
    Scene scene(cfg, index);
    const int dir = scene.dir;
    const double glow_rgb[3] = {0.8, 0.6, 1.0};
    const double sample_rgb[3] = {1.0, 0.9, 0.75};
    const double shock_rgb[3] = {0.75, 0.55, 1.0};
    const double flash = index < cfg.first_on + cfg.ignition_frames ? cfg.ignition_gain : 0.0;

    // Bounding box of everything that is not plain background.
    const double sx_lo = std::min({scene.disc_cx - scene.radius, scene.face_x, scene.shock_cx}) - 2;
    const double sx_hi = std::max({scene.disc_cx + scene.radius, scene.face_x, scene.shock_cx + dir * scene.shock_r}) + 2;
    const int x_lo = std::max(0, static_cast<int>(std::floor(std::min(sx_lo, sx_hi))));
    const int x_hi = std::min(cfg.width - 1, static_cast<int>(std::ceil(std::max(sx_lo, sx_hi))));
    const int y_lo = std::max(0, static_cast<int>(std::floor(scene.cy - scene.radius - 2)));
    const int y_hi = std::min(cfg.height - 1, static_cast<int>(std::ceil(scene.cy + scene.radius + 2)));

    for (int y = 0; y < cfg.height; ++y) {
      for (int x = 0; x < cfg.width; ++x) {
        const double upstream = dir > 0 ? x / double(cfg.width - 1) : (cfg.width - 1 - x) / double(cfg.width - 1);
        double cov_sample = 0.0;
        double cov_shock = 0.0;
        if (x >= x_lo && x <= x_hi && y >= y_lo && y <= y_hi) {
          // A 3x3 probe that agrees everywhere means the pixel does not straddle a boundary.
          const int probe = scene.label(x, y);
          bool uniform = true;
          for (int q = 0; q < 9 && uniform; ++q) uniform = scene.label(x + 0.5 * (q % 3 - 1), y + 0.5 * (q / 3 - 1)) == probe;
          if (uniform) {
            cov_sample = probe == 1 ? 1.0 : 0.0;
            cov_shock = probe == 2 ? 1.0 : 0.0;
          } else {
            int n_sample = 0;
            int n_shock = 0;
            for (int sy = 0; sy < kSuper; ++sy) {
              const double yy = y - 0.5 + (sy + 0.5) / kSuper;
              for (int sx = 0; sx < kSuper; ++sx) {
                const int c = scene.label(x - 0.5 + (sx + 0.5) / kSuper, yy);
                n_sample += c == 1;
                n_shock += c == 2;
              }
            }
            cov_sample = n_sample / double(kSuper * kSuper);
            cov_shock = n_shock / double(kSuper * kSuper);
          }
        }
        const double cov_bg = 1.0 - cov_sample - cov_shock;
        double* p = px(x, y);
        for (int c = 0; c < 3; ++c) {
          const double bg = cfg.background_level + cfg.plasma_glow * upstream * glow_rgb[c];
          p[c] = cov_bg * bg + cov_sample * cfg.sample_brightness * sample_rgb[c] +
                 cov_shock * cfg.shock_brightness * shock_rgb[c] + flash;
        }
      }
    }
  }

  // One independent stream per frame so frames can be rendered in any order.
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
  for (std::size_t i = 0; i < buf.size(); ++i) {
    double v = buf[i];
    if (cfg.noise_sigma > 0) v += noise(rng);
    img.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  return img;
}

void to_json(json& j, const GroundTruth& gt) {
  json frames = json::array();
  for (const auto& f : gt.per_frame) {
    frames.push_back({{"index", f.index}, {"edge_x", optional_row(f.edge_x)}, {"shock_x", optional_row(f.shock_x)}});
  }
  j = json{{"first_on", gt.first_on},
           {"last_on", gt.last_on},
           {"center_y", gt.center_y},
           {"flow_direction", to_string(gt.flow)},
           {"per_frame", std::move(frames)}};
}

void from_json(const json& j, GroundTruth& gt) {
  gt.first_on = j.at("first_on");
  gt.last_on = j.at("last_on");
  gt.center_y = j.value("center_y", 0.0);
  gt.flow = parse_flow(j.value("flow_direction", std::string("right")));
  gt.per_frame.clear();
  for (const auto& f : j.at("per_frame")) {
    gt.per_frame.push_back({f.at("index"), optional_row(f.at("edge_x")), optional_row(f.at("shock_x"))});
  }
}

SyntheticVideo generate_synthetic_video(const SynthVideoConfig& cfg, const fs::path& dir) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

  GroundTruth truth;
  truth.first_on = cfg.first_on;
  truth.last_on = cfg.last_on;
  truth.center_y = cfg.center_y();
  truth.flow = cfg.flow;

  json manifest{{"fps", cfg.fps}, {"width", cfg.width}, {"height", cfg.height}};
  json list = json::array();
  for (int i = 0; i < cfg.frame_count; ++i) {
    const std::string name = frame_file_name(i);
    png::write_file(dir / name, render_synthetic_frame(cfg, i));
    list.push_back(name);
    truth.per_frame.push_back(synthetic_ground_truth(cfg, i));
  }
  manifest["frames"] = std::move(list);
  write_json_file(dir / "manifest.json", manifest);
  write_json_file(dir / "ground_truth.json", json(truth));
  json cfg_json = cfg;
  write_json_file(dir / "synth_config.json", cfg_json);
  return {FrameSource::open(dir / "manifest.json"), std::move(truth)};
}

}  // namespace arcjet

#pragma once

// Synthetic videos cached under the build tree so that test binaries (and the
// acceptance run) do not re-render identical fixtures.

#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "json.hpp"

#include "arcjet/frames.hpp"
#include "arcjet/timeseg.hpp"

#ifndef ARCJET_TEST_CACHE_DIR
#define ARCJET_TEST_CACHE_DIR "/tmp/arcjet-test-cache"
#endif
#ifndef ARCJET_MODEL_PATH
#define ARCJET_MODEL_PATH "models/timeseg_default.json"
#endif

namespace testfx {

namespace fs = std::filesystem;

inline fs::path cache_root() { return ARCJET_TEST_CACHE_DIR; }

inline arcjet::SyntheticVideo cached_video(const arcjet::SynthVideoConfig& cfg, const std::string& name) {
  const fs::path dir = cache_root() / name;
  const nlohmann::json want = cfg;
  if (fs::exists(dir / "synth_config.json") && fs::exists(dir / "ground_truth.json")) {
    std::ifstream is(dir / "synth_config.json");
    nlohmann::json have;
    try {
      have = nlohmann::json::parse(is);
    } catch (...) {
    }
    if (have == want) {
      std::ifstream gs(dir / "ground_truth.json");
      return {arcjet::FrameSource::open(dir / "manifest.json"), nlohmann::json::parse(gs).get<arcjet::GroundTruth>()};
    }
  }
  // Render beside the target and swap in, so a half-written cache is never used.
  const fs::path tmp = cache_root() / (name + ".tmp" + std::to_string(::getpid()));
  fs::remove_all(tmp);
  arcjet::generate_synthetic_video(cfg, tmp);
  fs::remove_all(dir);
  fs::rename(tmp, dir);
  std::ifstream gs(dir / "ground_truth.json");
  return {arcjet::FrameSource::open(dir / "manifest.json"), nlohmann::json::parse(gs).get<arcjet::GroundTruth>()};
}

inline arcjet::SyntheticVideo default_video() { return cached_video(arcjet::SynthVideoConfig{}, "default"); }

inline arcjet::SynthVideoConfig left_config() {
  arcjet::SynthVideoConfig cfg;
  cfg.flow = arcjet::FlowDirection::Left;
  cfg.initial_edge_x = 211.0;  // mirror of 300 in a 512-wide frame
  return cfg;
}

inline arcjet::SyntheticVideo left_video() { return cached_video(left_config(), "left"); }

inline arcjet::SynthVideoConfig three_regime_config() {
  arcjet::SynthVideoConfig cfg;
  cfg.rate_profile = {{20, 0.2}, {40, 0.8}, {60, 0.4}};
  return cfg;
}

inline const arcjet::Conv1DNet& shipped_model() {
  static const arcjet::Conv1DNet net = arcjet::load_model(ARCJET_MODEL_PATH);
  return net;
}

/// Fresh scratch directory under the cache root.
inline fs::path scratch(const std::string& name) {
  const fs::path p = cache_root() / "scratch" / (name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace testfx

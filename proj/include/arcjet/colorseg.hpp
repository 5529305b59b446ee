#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "arcjet/geometry.hpp"
#include "arcjet/image.hpp"

namespace arcjet {

/// Per-pixel label. Numeric codes are part of the file interchange format.
enum class PixelClass : std::uint8_t { Background = 0, Sample = 1, SampleEdge = 2, Shock = 3 };

struct Hsv {
  double h = 0.0;  // degrees [0,360), 0 for achromatic pixels
  double s = 0.0;  // [0,1]
  double v = 0.0;  // [0,1]
};

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);
std::array<std::uint8_t, 3> hsv_to_rgb(const Hsv& hsv);

/// Box in HSV space. Hue wraps: h_lo > h_hi selects [h_lo,360) U [0,h_hi].
struct HsvRange {
  double h_lo = 0.0, h_hi = 0.0;
  double s_lo = 0.0, s_hi = 1.0;
  double v_lo = 0.0, v_hi = 1.0;

  bool contains(const Hsv& p) const {
    const bool hue_ok = h_lo <= h_hi ? (p.h >= h_lo && p.h <= h_hi) : (p.h >= h_lo || p.h <= h_hi);
    return hue_ok && p.s >= s_lo && p.s <= s_hi && p.v >= v_lo && p.v <= v_hi;
  }
  void validate() const;

  bool operator==(const HsvRange&) const = default;
};

enum class SegmentationMethod { AutoHsv, Hsv, Gray, Plugin };

std::string to_string(SegmentationMethod m);
SegmentationMethod parse_method(const std::string& text);

struct SegmentationConfig {
  SegmentationMethod method = SegmentationMethod::AutoHsv;
  std::vector<HsvRange> sample_ranges;
  std::vector<HsvRange> shock_ranges;
  int gray_threshold = 128;
  std::string plugin;  // registry name, PLUGIN method only

  /// Shipped AutoHSV presets: warm glowing material for the sample, violet
  /// plasma for the shock. Placeholders pending tuning on real footage.
  static std::vector<HsvRange> preset_sample_ranges();
  static std::vector<HsvRange> preset_shock_ranges();
  static SegmentationConfig auto_hsv();
  static SegmentationConfig gray(int threshold);

  void validate() const;

  bool operator==(const SegmentationConfig&) const = default;
};

/// Labels for a rectangular region of a frame. `roi_x`/`roi_y` place the mask
/// in full-frame coordinates.
struct PixelClassMask {
  int width = 0;
  int height = 0;
  int roi_x = 0;
  int roi_y = 0;
  std::vector<PixelClass> labels;

  PixelClassMask() = default;
  PixelClassMask(int w, int h, int ox = 0, int oy = 0)
      : width(w), height(h), roi_x(ox), roi_y(oy), labels(static_cast<std::size_t>(w) * h, PixelClass::Background) {}

  PixelClass& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }
  PixelClass at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t count(PixelClass c) const;

  bool operator==(const PixelClassMask&) const = default;
};

/// SHOCK if inside any shock range, else SAMPLE if inside any sample range,
/// else BACKGROUND. Never produces SAMPLE_EDGE.
PixelClassMask classify_hsv(const RgbImage& frame, const Roi& roi, const SegmentationConfig& config);
PixelClassMask classify_auto_hsv(const RgbImage& frame, const Roi& roi);
/// Luma >= threshold -> SAMPLE (inclusive), else BACKGROUND.
PixelClassMask classify_gray(const RgbImage& frame, const Roi& roi, int threshold);

/// Keeps the largest 4-connected component of `cls`; the rest of that class
/// becomes BACKGROUND. Ties go to the component whose first pixel comes first
/// in row-major order.
PixelClassMask largest_component(const PixelClassMask& mask, PixelClass cls);

/// Sizes of the 4-connected components of `cls`, in discovery (row-major) order.
std::vector<std::size_t> component_sizes(const PixelClassMask& mask, PixelClass cls);

/// Extension point for learned segmenters (the CNN method). Implementations
/// must be thread-safe and deterministic.
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual PixelClassMask classify(const RgbImage& frame, const Roi& roi) const = 0;
};

void register_segmenter(const std::string& name, std::shared_ptr<const Segmenter> segmenter);
std::shared_ptr<const Segmenter> find_segmenter(const std::string& name);

/// Dispatches on config.method. Throws Error{PluginMissing} for an unknown plugin.
PixelClassMask classify(const RgbImage& frame, const Roi& roi, const SegmentationConfig& config);

}  // namespace arcjet

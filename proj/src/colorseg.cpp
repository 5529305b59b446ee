#include "arcjet/colorseg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "arcjet/error.hpp"

namespace arcjet {

Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const int mx = std::max({r8, g8, b8});
  const int mn = std::min({r8, g8, b8});
  Hsv out;
  out.v = mx / 255.0;
  if (mx == 0) return out;
  const double delta = mx - mn;
  out.s = delta / mx;
  if (delta == 0) return out;

  const double r = r8, g = g8, b = b8;
  double h;
  if (mx == r8) {
    h = 60.0 * ((g - b) / delta);
  } else if (mx == g8) {
    h = 60.0 * ((b - r) / delta + 2.0);
  } else {
    h = 60.0 * ((r - g) / delta + 4.0);
  }
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

std::array<std::uint8_t, 3> hsv_to_rgb(const Hsv& hsv) {
  const double c = hsv.v * hsv.s;
  const double hp = std::fmod(std::fmod(hsv.h, 360.0) + 360.0, 360.0) / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp)) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
  }
  const double m = hsv.v - c;
  auto to8 = [](double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0), 0L, 255L)); };
  return {to8(r + m), to8(g + m), to8(b + m)};
}

void HsvRange::validate() const {
  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  if (!(h_lo >= 0 && h_lo < 360 && h_hi >= 0 && h_hi < 360)) {
    throw Error(ErrorCode::ConfigInvalid, "hue bounds must be in [0,360)");
  }
  if (!(in(s_lo, 0, 1) && in(s_hi, 0, 1) && s_lo <= s_hi)) {
    throw Error(ErrorCode::ConfigInvalid, "saturation bounds must satisfy 0 <= s_lo <= s_hi <= 1");
  }
  if (!(in(v_lo, 0, 1) && in(v_hi, 0, 1) && v_lo <= v_hi)) {
    throw Error(ErrorCode::ConfigInvalid, "value bounds must satisfy 0 <= v_lo <= v_hi <= 1");
  }
}

std::string to_string(SegmentationMethod m) {
  switch (m) {
    case SegmentationMethod::AutoHsv: return "auto-hsv";
    case SegmentationMethod::Hsv: return "hsv";
    case SegmentationMethod::Gray: return "gray";
    case SegmentationMethod::Plugin: return "plugin";
  }
  return "auto-hsv";
}

SegmentationMethod parse_method(const std::string& text) {
  if (text == "auto-hsv" || text == "AUTO_HSV") return SegmentationMethod::AutoHsv;
  if (text == "hsv" || text == "HSV") return SegmentationMethod::Hsv;
  if (text == "gray" || text == "GRAY") return SegmentationMethod::Gray;
  if (text == "plugin" || text == "PLUGIN") return SegmentationMethod::Plugin;
  throw Error(ErrorCode::ConfigInvalid, "unknown segmentation method '" + text + "'");
}

std::vector<HsvRange> SegmentationConfig::preset_sample_ranges() {
  // h in [330,360) U [0,70], any saturation, bright.
  return {HsvRange{330.0, 70.0, 0.0, 1.0, 0.6, 1.0}};
}

std::vector<HsvRange> SegmentationConfig::preset_shock_ranges() {
  return {HsvRange{240.0, 330.0, 0.1, 1.0, 0.35, 1.0}};
}

SegmentationConfig SegmentationConfig::auto_hsv() {
  SegmentationConfig c;
  c.method = SegmentationMethod::AutoHsv;
  c.sample_ranges = preset_sample_ranges();
  c.shock_ranges = preset_shock_ranges();
  return c;
}

SegmentationConfig SegmentationConfig::gray(int threshold) {
  SegmentationConfig c;
  c.method = SegmentationMethod::Gray;
  c.gray_threshold = threshold;
  return c;
}

void SegmentationConfig::validate() const {
  if (method == SegmentationMethod::Hsv && sample_ranges.empty()) {
    throw Error(ErrorCode::EmptyRangeList, "HSV method needs at least one sample range");
  }
  if (method == SegmentationMethod::Gray && (gray_threshold < 0 || gray_threshold > 255)) {
    throw Error(ErrorCode::ConfigInvalid, "gray_threshold must be in 0..255");
  }
  if (method == SegmentationMethod::Plugin && plugin.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "plugin method needs a plugin name");
  }
  for (const auto& r : sample_ranges) r.validate();
  for (const auto& r : shock_ranges) r.validate();
}

std::size_t PixelClassMask::count(PixelClass c) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), c));
}

namespace {

void check_roi(const RgbImage& frame, const Roi& roi) {
  if (!roi.fits_in(frame.width, frame.height)) {
    throw Error(ErrorCode::RoiOutOfBounds, "roi " + std::to_string(roi.x) + "," + std::to_string(roi.y) + "," +
                                               std::to_string(roi.w) + "," + std::to_string(roi.h) +
                                               " not inside " + std::to_string(frame.width) + "x" +
                                               std::to_string(frame.height));
  }
}

PixelClassMask classify_ranges(const RgbImage& frame, const Roi& roi, const std::vector<HsvRange>& sample,
                               const std::vector<HsvRange>& shock) {
  check_roi(frame, roi);
  PixelClassMask mask(roi.w, roi.h, roi.x, roi.y);
  for (int y = 0; y < roi.h; ++y) {
    const std::uint8_t* row = frame.at(roi.x, roi.y + y);
    PixelClass* out = &mask.at(0, y);
    for (int x = 0; x < roi.w; ++x, row += 3) {
      const Hsv p = rgb_to_hsv(row[0], row[1], row[2]);
      PixelClass c = PixelClass::Background;
      if (std::any_of(shock.begin(), shock.end(), [&](const HsvRange& r) { return r.contains(p); })) {
        c = PixelClass::Shock;
      } else if (std::any_of(sample.begin(), sample.end(), [&](const HsvRange& r) { return r.contains(p); })) {
        c = PixelClass::Sample;
      }
      out[x] = c;
    }
  }
  return mask;
}

}  // namespace

PixelClassMask classify_hsv(const RgbImage& frame, const Roi& roi, const SegmentationConfig& config) {
  if (config.sample_ranges.empty()) throw Error(ErrorCode::EmptyRangeList, "no sample ranges");
  for (const auto& r : config.sample_ranges) r.validate();
  for (const auto& r : config.shock_ranges) r.validate();
  return classify_ranges(frame, roi, config.sample_ranges, config.shock_ranges);
}

PixelClassMask classify_auto_hsv(const RgbImage& frame, const Roi& roi) {
  static const auto sample = SegmentationConfig::preset_sample_ranges();
  static const auto shock = SegmentationConfig::preset_shock_ranges();
  return classify_ranges(frame, roi, sample, shock);
}

PixelClassMask classify_gray(const RgbImage& frame, const Roi& roi, int threshold) {
  if (threshold < 0 || threshold > 255) throw Error(ErrorCode::ConfigInvalid, "threshold must be in 0..255");
  check_roi(frame, roi);
  PixelClassMask mask(roi.w, roi.h, roi.x, roi.y);
  for (int y = 0; y < roi.h; ++y) {
    const std::uint8_t* row = frame.at(roi.x, roi.y + y);
    for (int x = 0; x < roi.w; ++x, row += 3) {
      if (luminance(row[0], row[1], row[2]) >= threshold) mask.at(x, y) = PixelClass::Sample;
    }
  }
  return mask;
}

namespace {

// Labels each 4-connected component of `cls` with 1..n in row-major discovery
// order; returns the component sizes (index 0 unused).
std::vector<std::size_t> label_components(const PixelClassMask& mask, PixelClass cls, std::vector<int>& labels) {
  const int w = mask.width, h = mask.height;
  labels.assign(mask.labels.size(), 0);
  std::vector<std::size_t> sizes{0};
  std::vector<int> stack;
  for (int start = 0; start < w * h; ++start) {
    if (mask.labels[static_cast<std::size_t>(start)] != cls || labels[static_cast<std::size_t>(start)] != 0) continue;
    const int id = static_cast<int>(sizes.size());
    std::size_t size = 0;
    stack.push_back(start);
    labels[static_cast<std::size_t>(start)] = id;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      ++size;
      const int x = p % w, y = p / w;
      auto visit = [&](int q) {
        if (mask.labels[static_cast<std::size_t>(q)] == cls && labels[static_cast<std::size_t>(q)] == 0) {
          labels[static_cast<std::size_t>(q)] = id;
          stack.push_back(q);
        }
      };
      if (x > 0) visit(p - 1);
      if (x + 1 < w) visit(p + 1);
      if (y > 0) visit(p - w);
      if (y + 1 < h) visit(p + w);
    }
    sizes.push_back(size);
  }
  return sizes;
}

}  // namespace

std::vector<std::size_t> component_sizes(const PixelClassMask& mask, PixelClass cls) {
  std::vector<int> labels;
  auto sizes = label_components(mask, cls, labels);
  sizes.erase(sizes.begin());
  return sizes;
}

PixelClassMask largest_component(const PixelClassMask& mask, PixelClass cls) {
  std::vector<int> labels;
  const auto sizes = label_components(mask, cls, labels);
  if (sizes.size() <= 2) return mask;  // zero or one component

  std::size_t best = 1;
  for (std::size_t id = 2; id < sizes.size(); ++id) {
    if (sizes[id] > sizes[best]) best = id;
  }
  PixelClassMask out = mask;
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    if (labels[i] != 0 && static_cast<std::size_t>(labels[i]) != best) out.labels[i] = PixelClass::Background;
  }
  return out;
}

namespace {

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, std::shared_ptr<const Segmenter>>& registry() {
  static std::map<std::string, std::shared_ptr<const Segmenter>> r;
  return r;
}

}  // namespace

void register_segmenter(const std::string& name, std::shared_ptr<const Segmenter> segmenter) {
  std::lock_guard lock(registry_mutex());
  registry()[name] = std::move(segmenter);
}

std::shared_ptr<const Segmenter> find_segmenter(const std::string& name) {
  std::lock_guard lock(registry_mutex());
  auto it = registry().find(name);
  return it == registry().end() ? nullptr : it->second;
}

PixelClassMask classify(const RgbImage& frame, const Roi& roi, const SegmentationConfig& config) {
  switch (config.method) {
    case SegmentationMethod::AutoHsv:
      // Presets unless the caller overrode them.
      if (config.sample_ranges.empty() && config.shock_ranges.empty()) return classify_auto_hsv(frame, roi);
      return classify_ranges(frame, roi, config.sample_ranges, config.shock_ranges);
    case SegmentationMethod::Hsv: return classify_hsv(frame, roi, config);
    case SegmentationMethod::Gray: return classify_gray(frame, roi, config.gray_threshold);
    case SegmentationMethod::Plugin: {
      auto seg = find_segmenter(config.plugin);
      if (!seg) throw Error(ErrorCode::PluginMissing, "no segmenter registered as '" + config.plugin + "'");
      check_roi(frame, roi);
      auto mask = seg->classify(frame, roi);
      if (mask.width != roi.w || mask.height != roi.h) {
        throw Error(ErrorCode::DimensionMismatch, "plugin returned a mask of the wrong size");
      }
      return mask;
    }
  }
  return classify_auto_hsv(frame, roi);
}

}  // namespace arcjet

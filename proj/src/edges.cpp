#include "arcjet/edges.hpp"

#include <algorithm>
#include <cmath>

#include "arcjet/error.hpp"

namespace arcjet {

std::optional<double> EdgeTrace::x_at(double y) const {
  if (points.empty()) return std::nullopt;
  auto it = std::lower_bound(points.begin(), points.end(), y,
                             [](const EdgePoint& p, double value) { return p.y < value; });
  if (it == points.end()) return std::nullopt;
  if (it->y == y) return it->x;
  if (it == points.begin()) return std::nullopt;
  const EdgePoint& hi = *it;
  const EdgePoint& lo = *(it - 1);
  const double t = (y - lo.y) / double(hi.y - lo.y);
  return lo.x + t * (hi.x - lo.x);
}

namespace {

void check_range(const FrameSource& source, int first, int last, int stride) {
  if (stride < 1 || first < 0 || first > last || last >= source.frame_count()) {
    throw Error(ErrorCode::EmptyRange, "invalid frame range [" + std::to_string(first) + "," + std::to_string(last) +
                                           "] stride " + std::to_string(stride));
  }
}

}  // namespace

FlowDirection detect_flow_direction(const FrameSource& source, int first, int last, int stride) {
  check_range(source, first, last, stride);
  const int w = source.width();
  const int third = std::max(1, w / 3);
  double left = 0.0;
  double right = 0.0;
  for (int i = first; i <= last; i += stride) {
    const Frame f = source.get_frame(i);
    for (int y = 0; y < f.height(); ++y) {
      for (int x = 0; x < third; ++x) left += luminance_exact(f.image.at(x, y));
      for (int x = w - third; x < w; ++x) right += luminance_exact(f.image.at(x, y));
    }
  }
  return right > left ? FlowDirection::Right : FlowDirection::Left;
}

Roi buffered_bounding_box(const std::vector<PixelClassMask>& masks, int frame_width, int frame_height) {
  int x0 = frame_width, y0 = frame_height, x1 = -1, y1 = -1;
  for (const auto& m : masks) {
    for (int y = 0; y < m.height; ++y) {
      for (int x = 0; x < m.width; ++x) {
        if (m.at(x, y) == PixelClass::Background) continue;
        x0 = std::min(x0, m.roi_x + x);
        x1 = std::max(x1, m.roi_x + x);
        y0 = std::min(y0, m.roi_y + y);
        y1 = std::max(y1, m.roi_y + y);
      }
    }
  }
  if (x1 < 0) throw Error(ErrorCode::NothingSegmented, "no non-background pixels");

  const int bw = x1 - x0 + 1;
  const int bh = y1 - y0 + 1;
  const int pad_x = static_cast<int>(std::lround(0.1 * bw));
  const int pad_y = static_cast<int>(std::lround(0.1 * bh));
  int rx0 = std::max(0, x0 - pad_x);
  int ry0 = std::max(0, y0 - pad_y);
  int rx1 = std::min(frame_width - 1, x1 + pad_x);
  int ry1 = std::min(frame_height - 1, y1 + pad_y);
  // Keep the minimum ROI size even for single-pixel detections.
  while (rx1 - rx0 + 1 < 4) {
    if (rx0 > 0) --rx0;
    if (rx1 - rx0 + 1 < 4 && rx1 < frame_width - 1) ++rx1;
  }
  while (ry1 - ry0 + 1 < 4) {
    if (ry0 > 0) --ry0;
    if (ry1 - ry0 + 1 < 4 && ry1 < frame_height - 1) ++ry1;
  }
  return {rx0, ry0, rx1 - rx0 + 1, ry1 - ry0 + 1};
}

Roi auto_roi(const FrameSource& source, int first, int last, const SegmentationConfig& config) {
  check_range(source, first, last, 1);
  const Roi full = Roi::full(source.width(), source.height());
  std::vector<PixelClassMask> masks;
  for (int index : {first, last}) {
    auto mask = classify(source.get_frame(index).image, full, config);
    mask = largest_component(mask, PixelClass::Sample);
    mask = largest_component(mask, PixelClass::Shock);
    masks.push_back(std::move(mask));
    if (first == last) break;
  }
  return buffered_bounding_box(masks, source.width(), source.height());
}

EdgeTrace extract_leading_edge(const PixelClassMask& mask, PixelClass cls, FlowDirection flow, int frame_index) {
  EdgeTrace trace;
  trace.frame_index = frame_index;
  trace.kind = cls;
  auto matches = [cls](PixelClass c) {
    return c == cls || (cls == PixelClass::Sample && c == PixelClass::SampleEdge);
  };
  for (int y = 0; y < mask.height; ++y) {
    if (flow == FlowDirection::Left) {
      for (int x = 0; x < mask.width; ++x) {
        if (matches(mask.at(x, y))) {
          trace.points.push_back({double(mask.roi_x + x), mask.roi_y + y});
          break;
        }
      }
    } else {
      for (int x = mask.width - 1; x >= 0; --x) {
        if (matches(mask.at(x, y))) {
          trace.points.push_back({double(mask.roi_x + x), mask.roi_y + y});
          break;
        }
      }
    }
  }
  return trace;
}

EdgeTrace refine_leading_edge(const EdgeTrace& trace, const RgbImage& frame, FlowDirection flow) {
  constexpr double kMinContrast = 8.0;
  const int dir = upstream_sign(flow);
  EdgeTrace out = trace;
  for (EdgePoint& pt : out.points) {
    const int p = static_cast<int>(std::lround(pt.x));
    const int inside = p - dir;
    const int outside = p + 2 * dir;
    if (std::min(inside, outside) < 0 || std::max(inside, outside) >= frame.width) continue;
    if (pt.y < 0 || pt.y >= frame.height) continue;

    const double l_in = luminance_exact(frame.at(inside, pt.y));
    const double l_bg = luminance_exact(frame.at(outside, pt.y));
    const double contrast = l_in - l_bg;
    if (std::abs(contrast) < kMinContrast) continue;
    auto coverage = [&](int x) { return std::clamp((luminance_exact(frame.at(x, pt.y)) - l_bg) / contrast, 0.0, 1.0); };
    const double covered = coverage(p) + coverage(p + dir);
    const double x = p - 0.5 * dir + dir * covered;
    pt.x = std::clamp(x, 0.0, double(frame.width - 1));
  }
  return out;
}

PixelClassMask mark_sample_edge(const PixelClassMask& mask, const EdgeTrace& trace) {
  PixelClassMask out = mask;
  for (const EdgePoint& pt : trace.points) {
    const int row = pt.y - mask.roi_y;
    const int col = static_cast<int>(std::lround(pt.x)) - mask.roi_x;
    if (row < 0 || row >= mask.height) continue;
    for (int c : {col - 1, col, col + 1}) {
      if (c >= 0 && c < mask.width && mask.at(c, row) == PixelClass::Sample) out.at(c, row) = PixelClass::SampleEdge;
    }
  }
  return out;
}

}  // namespace arcjet

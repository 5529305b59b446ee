#pragma once

#include <string>
#include <string_view>

namespace arcjet {

/// Side of the frame the flow arrives from. The leading edge of the sample
/// faces this side.
enum class FlowDirection { Left, Right };

/// +1 when upstream is toward +x (flow from the right), -1 otherwise.
constexpr int upstream_sign(FlowDirection flow) { return flow == FlowDirection::Right ? 1 : -1; }

constexpr FlowDirection opposite(FlowDirection flow) {
  return flow == FlowDirection::Left ? FlowDirection::Right : FlowDirection::Left;
}

std::string_view to_string(FlowDirection flow);
FlowDirection parse_flow(std::string_view text);

struct Roi {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  bool contains(int px, int py) const { return px >= x && px < x + w && py >= y && py < y + h; }
  bool fits_in(int width, int height) const {
    return x >= 0 && y >= 0 && w >= 4 && h >= 4 && x + w <= width && y + h <= height;
  }

  static Roi full(int width, int height) { return {0, 0, width, height}; }

  bool operator==(const Roi&) const = default;
};

}  // namespace arcjet

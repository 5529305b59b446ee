#pragma once

#include <optional>
#include <vector>

#include "arcjet/colorseg.hpp"
#include "arcjet/frames.hpp"
#include "arcjet/geometry.hpp"

namespace arcjet {

struct EdgePoint {
  double x = 0.0;  // full-frame pixel-centre coordinate, may be fractional
  int y = 0;

  bool operator==(const EdgePoint&) const = default;
};

/// Upstream boundary of one class in one frame: at most one point per row,
/// strictly increasing y, full-frame coordinates.
struct EdgeTrace {
  int frame_index = 0;
  PixelClass kind = PixelClass::Sample;
  std::vector<EdgePoint> points;

  bool empty() const { return points.empty(); }
  /// x at a fractional row, linearly interpolated between the two trace
  /// points that straddle it. nullopt when y is outside the trace's span.
  std::optional<double> x_at(double y) const;

  bool operator==(const EdgeTrace&) const = default;
};

/// Compares mean luma of the left and right thirds of the columns, summed over
/// frames first, first+stride, ..., last. The brighter side is upstream; ties
/// resolve to LEFT. Throws Error{EmptyRange} for an invalid range.
FlowDirection detect_flow_direction(const FrameSource& source, int first, int last, int stride);

/// Buffered bounding box of everything not classified BACKGROUND in the first
/// and last frames (after largest-component cleanup), grown by 10% of each
/// dimension per side and clamped to the frame.
/// Throws Error{NothingSegmented} when both frames are entirely background.
Roi auto_roi(const FrameSource& source, int first, int last, const SegmentationConfig& config);
Roi buffered_bounding_box(const std::vector<PixelClassMask>& masks, int frame_width, int frame_height);

/// Per row, the first pixel of `cls` met when scanning from the upstream side.
/// Integer x. For cls == SAMPLE, SAMPLE_EDGE pixels count as sample.
EdgeTrace extract_leading_edge(const PixelClassMask& mask, PixelClass cls, FlowDirection flow, int frame_index = 0);

/// Moves each point to a sub-pixel boundary estimate using luma coverage of
/// the boundary pixel and its upstream neighbour, referenced against one
/// pixel further inside and one further outside. Points whose references fall
/// outside the frame, or whose contrast is too low, keep their integer x.
EdgeTrace refine_leading_edge(const EdgeTrace& trace, const RgbImage& frame, FlowDirection flow);

/// Relabels traced pixels and their horizontal neighbours as SAMPLE_EDGE,
/// touching only pixels that were SAMPLE. `trace` must carry integer x.
PixelClassMask mark_sample_edge(const PixelClassMask& mask, const EdgeTrace& trace);

}  // namespace arcjet

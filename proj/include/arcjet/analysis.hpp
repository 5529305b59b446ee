#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "arcjet/edges.hpp"
#include "arcjet/geometry.hpp"

namespace arcjet {

struct EdgesFile;
struct FrameRecord;

struct Calibration {
  double model_diameter_mm = 0.0;
  /// Sample extent in pixels on the reference frame. When absent it is taken
  /// from the y-span of the first kept frame's sample trace.
  std::optional<double> measured_diameter_px;

  void validate() const;
  /// Requires measured_diameter_px.
  double mm_per_px() const;

  bool operator==(const Calibration&) const = default;
};

void to_json(nlohmann::json& j, const Calibration& c);
void from_json(const nlohmann::json& j, Calibration& c);

std::vector<double> default_stations();

struct LinearFitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
  double r_squared = 1.0;
  int n_points = 0;
};

/// Ordinary least squares. sigma^2 = SSR/(n-2) (0 for n = 2); r^2 = 1 when SST = 0.
/// Throws Error{DegenerateInput} for n < 2 or mismatched lengths,
/// Error{DegenerateAbscissa} when all t are equal.
LinearFitResult linear_fit(std::span<const double> t, std::span<const double> y);

/// |x_sample(y_center) - x_shock(y_center)| with rows interpolated.
/// Throws Error{MissingEdge} if either trace does not span y_center.
double compute_standoff(const EdgeTrace& sample, const EdgeTrace& shock, double y_center);

using Series = std::vector<std::optional<double>>;

struct TimeSeriesBundle {
  std::vector<int> frame_indices;
  std::vector<double> time_s;
  std::vector<double> stations;     // fractions of radius_px around center_y
  std::vector<Series> recession_mm;  // [station][frame]
  Series area_mm2;
  Series standoff_mm;
  Series vertical_mm;

  double mm_per_px = 0.0;
  double measured_diameter_px = 0.0;
  double center_y = 0.0;
  double radius_px = 0.0;
  int reference_frame = 0;
  FlowDirection flow = FlowDirection::Right;

  std::size_t size() const { return frame_indices.size(); }
  /// time_s excluded; order matches the series CSV columns.
  std::vector<std::string> channel_names() const;
  const Series& channel(const std::string& name) const;

  bool operator==(const TimeSeriesBundle&) const = default;
};

std::string station_channel_name(double station);

/// Frames from all files keyed by index; a later file replaces an earlier
/// file's entry for the same index. Throws Error{InconsistentDimensions} when
/// files disagree on frame size or flow direction.
std::vector<FrameRecord> merge_frames(std::span<const EdgesFile> files);

/// Kept frames are those not rejected, without a processing error and with a
/// non-empty sample edge. Throws Error{NoKeptFrames}.
TimeSeriesBundle build_time_series(std::span<const EdgesFile> files, const Calibration& calibration,
                                   std::span<const double> stations);

struct ChannelFit {
  std::string channel;
  std::optional<LinearFitResult> fit;  // absent with fewer than two usable points
  int n_points = 0;
};

/// Fit of one channel against time over frames with t_lo <= time_s <= t_hi.
ChannelFit fit_channel(const TimeSeriesBundle& bundle, const std::string& channel,
                       double t_lo = -std::numeric_limits<double>::infinity(),
                       double t_hi = std::numeric_limits<double>::infinity());
std::vector<ChannelFit> fit_all(const TimeSeriesBundle& bundle);

/// Shortest decimal that round-trips.
std::string format_number(double v);

/// Writes <prefix>_series.csv and <prefix>_fits.csv. Throws Error{IoFailure}.
void export_csv(const TimeSeriesBundle& bundle, std::span<const ChannelFit> fits, const std::string& prefix);
std::string series_csv(const TimeSeriesBundle& bundle);
std::string fits_csv(std::span<const ChannelFit> fits);

nlohmann::json to_json(const TimeSeriesBundle& bundle);
nlohmann::json to_json(std::span<const ChannelFit> fits);

}  // namespace arcjet

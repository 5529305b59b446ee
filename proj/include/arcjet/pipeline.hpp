#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "arcjet/analysis.hpp"
#include "arcjet/colorseg.hpp"
#include "arcjet/edges.hpp"
#include "arcjet/frames.hpp"
#include "arcjet/geometry.hpp"
#include "arcjet/outliers.hpp"
#include "arcjet/timeseg.hpp"

namespace arcjet {

inline constexpr const char* kMetaSchema = "arcjetcv-meta/1";
inline constexpr const char* kEdgesSchema = "arcjetcv-edges/1";

std::string tool_version();

/// Which automatically deduced parameters could not be determined.
struct NeedsManual {
  bool window = false;
  bool roi = false;
  bool flow = false;

  bool any() const { return window || roi || flow; }
  bool operator==(const NeedsManual&) const = default;
};

struct Provenance {
  std::string tool_version;
  std::uint64_t seed = 0;
  nlohmann::json timestamps = nlohmann::json::object();  // ignored by canonical comparison
};

struct ProcessingMeta {
  std::string manifest;
  int first_frame = 0;
  int last_frame = 0;
  int frame_stride = 10;
  Roi roi;
  FlowDirection flow = FlowDirection::Right;
  SegmentationConfig segmentation = SegmentationConfig::auto_hsv();
  LofConfig lof;
  std::optional<Calibration> calibration;
  std::string model_path;
  Provenance provenance;
  NeedsManual needs_manual;

  /// Throws Error{ConfigInvalid} / Error{RoiOutOfBounds}.
  void validate(int frame_count, int width, int height) const;
  std::vector<int> frame_indices() const;
};

void to_json(nlohmann::json& j, const ProcessingMeta& m);
void from_json(const nlohmann::json& j, ProcessingMeta& m);
void to_json(nlohmann::json& j, const SegmentationConfig& c);
void from_json(const nlohmann::json& j, SegmentationConfig& c);

void save_meta(const ProcessingMeta& meta, const std::filesystem::path& path);
ProcessingMeta load_meta(const std::filesystem::path& path);

/// Per-frame quantities fed to outlier rejection.
struct FrameFeatures {
  double sample_area_px = 0.0;
  double edge_rows = 0.0;
  double centerline_x = 0.0;  // sample edge x at the middle row of the trace
  double mean_luma = 0.0;     // over SAMPLE and SAMPLE_EDGE pixels

  std::vector<double> vector() const { return {sample_area_px, edge_rows, centerline_x, mean_luma}; }
  bool operator==(const FrameFeatures&) const = default;
};

struct FrameRecord {
  int index = 0;
  double time_s = 0.0;
  EdgeTrace sample_edge;
  std::optional<EdgeTrace> shock_edge;  // absent for the gray method
  FrameFeatures features;
  bool rejected = false;
  std::optional<double> lof_score;  // absent for frames not scored
  std::string error;                // non-empty when the frame failed

  bool usable() const { return error.empty() && !sample_edge.empty(); }
};

struct EdgesFile {
  ProcessingMeta meta;
  int width = 0;
  int height = 0;
  double fps = 0.0;
  std::vector<FrameRecord> frames;  // sorted by index

  std::vector<int> rejected_frames() const;
};

void to_json(nlohmann::json& j, const EdgesFile& f);
/// Throws Error{SchemaMismatch} on a missing or wrong schema tag.
void from_json(const nlohmann::json& j, EdgesFile& f);

/// Stable text form (two-space indent, trailing newline).
std::string dump_json(const nlohmann::json& j);
void write_edges_file(const EdgesFile& file, const std::filesystem::path& path);
EdgesFile read_edges_file(const std::filesystem::path& path);

/// Copy with meta.provenance.timestamps removed, for equality checks.
nlohmann::json without_timestamps(nlohmann::json j);

// ---------------------------------------------------------------------------

/// Fills window (time segmentation), flow and ROI from the video. Failures
/// leave the affected fields at whole-video defaults and set needs_manual.
ProcessingMeta auto_configure(const FrameSource& source, const Conv1DNet& model, const std::string& model_path = "");

/// One frame through classify -> cleanup -> leading edges -> edge marking.
struct FrameAnalysis {
  PixelClassMask mask;  // after cleanup and SAMPLE_EDGE marking
  EdgeTrace sample_edge;
  std::optional<EdgeTrace> shock_edge;
  FrameFeatures features;
};

FrameAnalysis analyze_frame(const RgbImage& image, int frame_index, const Roi& roi, FlowDirection flow,
                            const SegmentationConfig& segmentation);

struct ProcessOptions {
  int threads = 1;
  std::function<void(int done, int total)> progress;
  const std::atomic<bool>* cancel = nullptr;
};

/// Runs every frame first, first+stride, ..., <= last, then LOF rejection.
/// Per-frame failures are recorded on the frame. Output ordered by index and
/// independent of the thread count.
EdgesFile process(const FrameSource& source, const ProcessingMeta& meta, const ProcessOptions& options = {});

struct AnalysisSummary {
  TimeSeriesBundle bundle;
  std::vector<ChannelFit> fits;
  std::filesystem::path series_csv;
  std::filesystem::path fits_csv;
};

/// Throws Error{UsageError} for an empty list.
AnalysisSummary analyze(const std::vector<EdgesFile>& files, const Calibration& calibration,
                        std::span<const double> stations, const std::string& out_prefix = "");
AnalysisSummary analyze(const std::vector<std::filesystem::path>& edges_paths, const Calibration& calibration,
                        std::span<const double> stations, const std::string& out_prefix = "");

nlohmann::json to_json(const AnalysisSummary& summary);

}  // namespace arcjet

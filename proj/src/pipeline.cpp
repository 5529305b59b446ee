#include "arcjet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "arcjet/error.hpp"

namespace arcjet {

using nlohmann::json;

std::string tool_version() { return "arcjetcv 0.1.0"; }

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double read_number_or_inf(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::SchemaMismatch, "expected a number, got '" + s + "'");
  }
  return j.get<double>();
}

json range_json(const HsvRange& r) {
  return {{"h_lo", r.h_lo}, {"h_hi", r.h_hi}, {"s_lo", r.s_lo}, {"s_hi", r.s_hi}, {"v_lo", r.v_lo}, {"v_hi", r.v_hi}};
}

HsvRange range_from(const json& j) {
  HsvRange r;
  r.h_lo = j.at("h_lo").get<double>();
  r.h_hi = j.at("h_hi").get<double>();
  r.s_lo = j.value("s_lo", 0.0);
  r.s_hi = j.value("s_hi", 1.0);
  r.v_lo = j.value("v_lo", 0.0);
  r.v_hi = j.value("v_hi", 1.0);
  return r;
}

json trace_json(const EdgeTrace& t) {
  json a = json::array();
  for (const auto& p : t.points) a.push_back(json::array({p.x, p.y}));
  return a;
}

EdgeTrace trace_from(const json& j, int frame_index, PixelClass kind) {
  EdgeTrace t;
  t.frame_index = frame_index;
  t.kind = kind;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::SchemaMismatch, "edge point must be [x, y]");
    t.points.push_back({p[0].get<double>(), p[1].get<int>()});
  }
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Metadata
// ---------------------------------------------------------------------------

void to_json(json& j, const SegmentationConfig& c) {
  json sample = json::array(), shock = json::array();
  for (const auto& r : c.sample_ranges) sample.push_back(range_json(r));
  for (const auto& r : c.shock_ranges) shock.push_back(range_json(r));
  j = {{"method", to_string(c.method)},
       {"sample_ranges", sample},
       {"shock_ranges", shock},
       {"gray_threshold", c.gray_threshold},
       {"plugin", c.plugin}};
}

void from_json(const json& j, SegmentationConfig& c) {
  c = SegmentationConfig{};
  c.method = parse_method(j.at("method").get<std::string>());
  c.sample_ranges.clear();
  c.shock_ranges.clear();
  if (j.contains("sample_ranges")) {
    for (const auto& r : j["sample_ranges"]) c.sample_ranges.push_back(range_from(r));
  }
  if (j.contains("shock_ranges")) {
    for (const auto& r : j["shock_ranges"]) c.shock_ranges.push_back(range_from(r));
  }
  c.gray_threshold = j.value("gray_threshold", 128);
  c.plugin = j.value("plugin", std::string{});
}

void ProcessingMeta::validate(int frame_count, int width, int height) const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::ConfigInvalid, why); };
  if (frame_stride < 1) fail("frame_stride must be >= 1");
  if (first_frame < 0 || first_frame > last_frame || last_frame >= frame_count) {
    fail("frame window [" + std::to_string(first_frame) + "," + std::to_string(last_frame) + "] outside [0," +
         std::to_string(frame_count - 1) + "]");
  }
  if (!roi.fits_in(width, height)) throw Error(ErrorCode::RoiOutOfBounds, "ROI does not fit the frame");
  segmentation.validate();
  lof.validate();
  if (calibration) calibration->validate();
}

std::vector<int> ProcessingMeta::frame_indices() const {
  std::vector<int> out;
  for (int i = first_frame; i <= last_frame; i += std::max(1, frame_stride)) out.push_back(i);
  return out;
}

void to_json(json& j, const ProcessingMeta& m) {
  j = {{"schema", kMetaSchema},
       {"manifest", m.manifest},
       {"first_frame", m.first_frame},
       {"last_frame", m.last_frame},
       {"frame_stride", m.frame_stride},
       {"roi", {{"x", m.roi.x}, {"y", m.roi.y}, {"w", m.roi.w}, {"h", m.roi.h}}},
       {"flow", std::string(to_string(m.flow))},
       {"segmentation", m.segmentation},
       {"lof", {{"k", m.lof.k}, {"threshold", number_or_inf(m.lof.threshold)}}},
       {"calibration", nullptr},
       {"model_path", m.model_path},
       {"provenance",
        {{"tool_version", m.provenance.tool_version},
         {"seed", m.provenance.seed},
         {"timestamps", m.provenance.timestamps}}},
       {"needs_manual",
        {{"window", m.needs_manual.window}, {"roi", m.needs_manual.roi}, {"flow", m.needs_manual.flow}}}};
  if (m.calibration) j["calibration"] = *m.calibration;
}

void from_json(const json& j, ProcessingMeta& m) {
  if (!j.is_object() || j.value("schema", std::string{}) != kMetaSchema) {
    throw Error(ErrorCode::SchemaMismatch, std::string("expected schema ") + kMetaSchema);
  }
  try {
    m = ProcessingMeta{};
    m.manifest = j.value("manifest", std::string{});
    m.first_frame = j.at("first_frame").get<int>();
    m.last_frame = j.at("last_frame").get<int>();
    m.frame_stride = j.value("frame_stride", 10);
    const json& r = j.at("roi");
    m.roi = {r.at("x").get<int>(), r.at("y").get<int>(), r.at("w").get<int>(), r.at("h").get<int>()};
    m.flow = parse_flow(j.at("flow").get<std::string>());
    if (j.contains("segmentation")) m.segmentation = j["segmentation"].get<SegmentationConfig>();
    if (j.contains("lof")) {
      m.lof.k = j["lof"].value("k", 20);
      if (j["lof"].contains("threshold")) m.lof.threshold = read_number_or_inf(j["lof"]["threshold"]);
    }
    if (j.contains("calibration") && !j["calibration"].is_null()) m.calibration = j["calibration"].get<Calibration>();
    m.model_path = j.value("model_path", std::string{});
    if (j.contains("provenance")) {
      const json& p = j["provenance"];
      m.provenance.tool_version = p.value("tool_version", std::string{});
      m.provenance.seed = p.value("seed", std::uint64_t{0});
      m.provenance.timestamps = p.value("timestamps", json::object());
    }
    if (j.contains("needs_manual")) {
      const json& n = j["needs_manual"];
      m.needs_manual = {n.value("window", false), n.value("roi", false), n.value("flow", false)};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("malformed meta: ") + e.what());
  }
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  os << text;
  if (!os) throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, path.string() + ": " + e.what());
  }
}

}  // namespace

void save_meta(const ProcessingMeta& meta, const std::filesystem::path& path) { write_text(path, dump_json(meta)); }

ProcessingMeta load_meta(const std::filesystem::path& path) { return read_json(path).get<ProcessingMeta>(); }

// ---------------------------------------------------------------------------
// Edges files
// ---------------------------------------------------------------------------

std::vector<int> EdgesFile::rejected_frames() const {
  std::vector<int> out;
  for (const auto& f : frames) {
    if (f.rejected) out.push_back(f.index);
  }
  return out;
}

void to_json(json& j, const EdgesFile& f) {
  json frames = json::array();
  for (const FrameRecord& r : f.frames) {
    json e = {{"index", r.index},
              {"time_s", r.time_s},
              {"sample_edge", trace_json(r.sample_edge)},
              {"shock_edge", nullptr},
              {"features",
               {{"sample_area_px", r.features.sample_area_px},
                {"edge_rows", r.features.edge_rows},
                {"centerline_x", r.features.centerline_x},
                {"mean_luma", r.features.mean_luma}}},
              {"rejected", r.rejected},
              {"lof_score", nullptr},
              {"error", nullptr}};
    if (r.shock_edge) e["shock_edge"] = trace_json(*r.shock_edge);
    if (r.lof_score) e["lof_score"] = number_or_inf(*r.lof_score);
    if (!r.error.empty()) e["error"] = r.error;
    frames.push_back(std::move(e));
  }
  j = {{"schema", kEdgesSchema}, {"meta", f.meta},         {"width", f.width},
       {"height", f.height},     {"fps", f.fps},           {"frames", frames},
       {"rejected_frames", f.rejected_frames()}};
}

void from_json(const json& j, EdgesFile& f) {
  if (!j.is_object() || j.value("schema", std::string{}) != kEdgesSchema) {
    throw Error(ErrorCode::SchemaMismatch, std::string("expected schema ") + kEdgesSchema);
  }
  try {
    f = EdgesFile{};
    f.meta = j.at("meta").get<ProcessingMeta>();
    f.width = j.at("width").get<int>();
    f.height = j.at("height").get<int>();
    f.fps = j.at("fps").get<double>();
    for (const json& e : j.at("frames")) {
      FrameRecord r;
      r.index = e.at("index").get<int>();
      r.time_s = e.at("time_s").get<double>();
      r.sample_edge = trace_from(e.at("sample_edge"), r.index, PixelClass::Sample);
      if (!e.at("shock_edge").is_null()) r.shock_edge = trace_from(e["shock_edge"], r.index, PixelClass::Shock);
      const json& ft = e.at("features");
      r.features = {ft.at("sample_area_px").get<double>(), ft.at("edge_rows").get<double>(),
                    ft.at("centerline_x").get<double>(), ft.at("mean_luma").get<double>()};
      r.rejected = e.at("rejected").get<bool>();
      if (e.contains("lof_score") && !e["lof_score"].is_null()) r.lof_score = read_number_or_inf(e["lof_score"]);
      if (e.contains("error") && !e["error"].is_null()) r.error = e["error"].get<std::string>();
      f.frames.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("malformed edges file: ") + e.what());
  }
  const bool sorted = std::is_sorted(f.frames.begin(), f.frames.end(),
                                     [](const FrameRecord& a, const FrameRecord& b) { return a.index < b.index; });
  if (!sorted) throw Error(ErrorCode::SchemaMismatch, "frames are not sorted by index");
}

void write_edges_file(const EdgesFile& file, const std::filesystem::path& path) {
  write_text(path, dump_json(file));
}

EdgesFile read_edges_file(const std::filesystem::path& path) { return read_json(path).get<EdgesFile>(); }

json without_timestamps(json j) {
  json* meta = j.contains("meta") ? &j["meta"] : &j;
  if (meta->is_object() && meta->contains("provenance")) (*meta)["provenance"].erase("timestamps");
  return j;
}

// ---------------------------------------------------------------------------
// Auto configuration and processing
// ---------------------------------------------------------------------------

ProcessingMeta auto_configure(const FrameSource& source, const Conv1DNet& model, const std::string& model_path) {
  if (source.frame_count() < 1) throw Error(ErrorCode::EmptySource, "source has no frames");
  ProcessingMeta m;
  m.manifest = source.manifest_path().string();
  m.model_path = model_path;
  m.first_frame = 0;
  m.last_frame = source.frame_count() - 1;
  m.roi = Roi::full(source.width(), source.height());
  m.provenance.tool_version = tool_version();
  m.provenance.timestamps["configured"] = utc_now();

  const int n = source.frame_count();
  const int brightness_stride = std::max(1, (n + 255) / 256);
  try {
    const BrightnessTrace trace = compute_brightness_trace(source, brightness_stride);
    const InterestWindow w = infer_interest_window(model, trace);
    m.first_frame = w.first_frame;
    m.last_frame = std::min(n - 1, w.last_frame);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoOnRegion && e.code() != ErrorCode::WrongLength) throw;
    m.needs_manual.window = true;
  }

  const int flow_stride = std::max(1, (m.last_frame - m.first_frame) / 16);
  m.flow = detect_flow_direction(source, m.first_frame, m.last_frame, flow_stride);

  try {
    m.roi = auto_roi(source, m.first_frame, m.last_frame, SegmentationConfig::auto_hsv());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NothingSegmented) throw;
    m.needs_manual.roi = true;
  }
  return m;
}

FrameAnalysis analyze_frame(const RgbImage& image, int frame_index, const Roi& roi, FlowDirection flow,
                            const SegmentationConfig& segmentation) {
  FrameAnalysis out;
  PixelClassMask mask = classify(image, roi, segmentation);
  mask = largest_component(mask, PixelClass::Sample);
  const bool has_shock = segmentation.method != SegmentationMethod::Gray;
  if (has_shock) mask = largest_component(mask, PixelClass::Shock);

  const EdgeTrace sample_px = extract_leading_edge(mask, PixelClass::Sample, flow, frame_index);
  out.mask = mark_sample_edge(mask, sample_px);
  out.sample_edge = refine_leading_edge(sample_px, image, flow);
  if (has_shock) {
    out.shock_edge = refine_leading_edge(extract_leading_edge(mask, PixelClass::Shock, flow, frame_index), image, flow);
  }

  FrameFeatures& ft = out.features;
  ft.sample_area_px = static_cast<double>(out.mask.count(PixelClass::Sample) + out.mask.count(PixelClass::SampleEdge));
  ft.edge_rows = static_cast<double>(out.sample_edge.points.size());
  if (!out.sample_edge.empty()) {
    const double mid = 0.5 * (out.sample_edge.points.front().y + out.sample_edge.points.back().y);
    ft.centerline_x = out.sample_edge.x_at(std::floor(mid)).value_or(out.sample_edge.points.front().x);
  }
  double luma = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < out.mask.height; ++y) {
    for (int x = 0; x < out.mask.width; ++x) {
      const PixelClass c = out.mask.at(x, y);
      if (c != PixelClass::Sample && c != PixelClass::SampleEdge) continue;
      luma += luminance_exact(image.at(roi.x + x, roi.y + y));
      ++n;
    }
  }
  ft.mean_luma = n ? luma / static_cast<double>(n) : 0.0;
  return out;
}

EdgesFile process(const FrameSource& source, const ProcessingMeta& meta, const ProcessOptions& options) {
  meta.validate(source.frame_count(), source.width(), source.height());
  EdgesFile out;
  out.meta = meta;
  out.width = source.width();
  out.height = source.height();
  out.fps = source.fps();

  const std::vector<int> indices = meta.frame_indices();
  const int total = static_cast<int>(indices.size());
  out.frames.resize(indices.size());

  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex fail_mutex;
  std::exception_ptr failure;
  std::mutex progress_mutex;

  auto worker = [&] {
    for (;;) {
      if (options.cancel && options.cancel->load()) return;
      {
        std::lock_guard lock(fail_mutex);
        if (failure) return;
      }
      const int pos = next.fetch_add(1);
      if (pos >= total) return;
      FrameRecord& rec = out.frames[static_cast<std::size_t>(pos)];
      rec.index = indices[static_cast<std::size_t>(pos)];
      rec.time_s = rec.index / source.fps();
      rec.sample_edge.frame_index = rec.index;
      try {
        const Frame frame = source.get_frame(rec.index);
        FrameAnalysis fa = analyze_frame(frame.image, rec.index, meta.roi, meta.flow, meta.segmentation);
        rec.sample_edge = std::move(fa.sample_edge);
        rec.shock_edge = std::move(fa.shock_edge);
        rec.features = fa.features;
        if (rec.sample_edge.empty()) rec.error = "no sample pixels in ROI";
      } catch (const Error& e) {
        if (e.code() == ErrorCode::IoFailure || e.code() == ErrorCode::PluginMissing) {
          std::lock_guard lock(fail_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
        rec.error = e.what();
      }
      const int d = done.fetch_add(1) + 1;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(d, total);
      }
    }
  };

  const int threads = std::clamp(options.threads, 1, std::max(1, total));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  if (options.cancel && options.cancel->load()) throw Error(ErrorCode::ConfigInvalid, "processing cancelled");

  std::vector<std::size_t> scored;
  PointSet features;
  for (std::size_t i = 0; i < out.frames.size(); ++i) {
    if (!out.frames[i].usable()) continue;
    scored.push_back(i);
    features.push_back(out.frames[i].features.vector());
  }
  const FrameFilterResult filt = filter_frames(features, meta.lof);
  for (std::size_t k = 0; k < scored.size(); ++k) {
    FrameRecord& rec = out.frames[scored[k]];
    rec.rejected = !filt.keep[k];
    rec.lof_score = filt.scores[k];
  }
  out.meta.provenance.tool_version = tool_version();
  out.meta.provenance.timestamps["processed"] = utc_now();
  return out;
}

// ---------------------------------------------------------------------------
// Analysis
// ---------------------------------------------------------------------------

AnalysisSummary analyze(const std::vector<EdgesFile>& files, const Calibration& calibration,
                        std::span<const double> stations, const std::string& out_prefix) {
  if (files.empty()) throw Error(ErrorCode::UsageError, "no edges files given");
  AnalysisSummary s;
  s.bundle = build_time_series(files, calibration, stations);
  s.fits = fit_all(s.bundle);
  if (!out_prefix.empty()) {
    export_csv(s.bundle, s.fits, out_prefix);
    s.series_csv = out_prefix + "_series.csv";
    s.fits_csv = out_prefix + "_fits.csv";
  }
  return s;
}

AnalysisSummary analyze(const std::vector<std::filesystem::path>& edges_paths, const Calibration& calibration,
                        std::span<const double> stations, const std::string& out_prefix) {
  if (edges_paths.empty()) throw Error(ErrorCode::UsageError, "no edges files given");
  std::vector<EdgesFile> files;
  for (const auto& p : edges_paths) files.push_back(read_edges_file(p));
  return analyze(files, calibration, stations, out_prefix);
}

json to_json(const AnalysisSummary& s) {
  return {{"series", to_json(s.bundle)}, {"fits", to_json(std::span<const ChannelFit>(s.fits))}};
}

}  // namespace arcjet

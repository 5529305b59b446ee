// arcjetcv: batch front end for the arcjet video pipeline.
//
//   arcjetcv process <manifest> [--first N --last M] [--stride K] [--roi X,Y,W,H] ...
//   arcjetcv analyze <edges.json ...> --diameter-mm D --out PREFIX
//   arcjetcv train-timeseg --out model.json
//   arcjetcv synth --config cfg.json --out DIR
//   arcjetcv serve [--port 8080] [--static DIR]
//
// Exit codes: 0 ok, 2 usage, 3 input error, 4 processing error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "arcjet/error.hpp"
#include "arcjet/pipeline.hpp"
#include "arcjet/service.hpp"

#ifndef ARCJETCV_DEFAULT_MODEL
#define ARCJETCV_DEFAULT_MODEL ""
#endif

namespace fs = std::filesystem;
using namespace arcjet;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitProcessing = 4;

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::UsageError:
      return kExitUsage;
    case ErrorCode::MissingManifest:
    case ErrorCode::MalformedManifest:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::DecodeFailure:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::IoFailure:
    case ErrorCode::RoiOutOfBounds:
    case ErrorCode::EmptyRangeList:
    case ErrorCode::EmptyRange:
    case ErrorCode::EmptySource:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::InconsistentDimensions:
    case ErrorCode::PluginMissing:
      return kExitInput;
    default:
      return kExitProcessing;
  }
}

// --model, then $ARCJETCV_MODEL, then models/ next to the install, then the source tree.
std::string resolve_model(const std::string& given) {
  if (!given.empty()) return given;
  if (const char* env = std::getenv("ARCJETCV_MODEL"); env && *env) return env;
  std::error_code ec;
  const fs::path exe = fs::canonical("/proc/self/exe", ec);
  if (!ec) {
    for (const fs::path& p : {exe.parent_path() / "../models/timeseg_default.json",
                              exe.parent_path() / "../share/arcjetcv/timeseg_default.json"}) {
      if (fs::exists(p)) return p.lexically_normal().string();
    }
  }
  return ARCJETCV_DEFAULT_MODEL;
}

std::vector<int> parse_ints(const std::string& text, std::size_t expected, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::UsageError, what + ": '" + item + "' is not an integer");
    }
  }
  if (out.size() != expected) throw Error(ErrorCode::UsageError, what + " needs " + std::to_string(expected) + " values");
  return out;
}

HsvRange parse_hsv(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::UsageError, "HSV range: '" + item + "' is not a number");
    }
  }
  if (v.size() != 6) throw Error(ErrorCode::UsageError, "HSV range needs h_lo,h_hi,s_lo,s_hi,v_lo,v_hi");
  HsvRange r{v[0], v[1], v[2], v[3], v[4], v[5]};
  r.validate();
  return r;
}

struct ProcessArgs {
  std::string manifest;
  std::string meta_path;
  std::string method;
  std::optional<int> first, last, stride;
  std::string roi, flow, model, out = "edges.json", save_meta;
  std::vector<std::string> sample_hsv, shock_hsv;
  std::optional<int> gray_threshold, lof_k;
  std::optional<double> lof_threshold;
  int threads = 1;
  bool quiet = false;
};

int run_process(const ProcessArgs& a) {
  ProcessingMeta meta;
  std::optional<FrameSource> source;
  if (!a.meta_path.empty()) {
    meta = load_meta(a.meta_path);
    if (!a.manifest.empty()) meta.manifest = a.manifest;
    source = FrameSource::open(meta.manifest);
  } else {
    if (a.manifest.empty()) throw Error(ErrorCode::UsageError, "a manifest or --meta is required");
    source = FrameSource::open(a.manifest);
    const bool fully_manual = a.first && a.last && !a.roi.empty() && !a.flow.empty();
    if (fully_manual) {
      meta.manifest = source->manifest_path().string();
      meta.provenance.tool_version = tool_version();
    } else {
      const std::string model_path = resolve_model(a.model);
      if (model_path.empty() || !fs::exists(model_path)) {
        throw Error(ErrorCode::IoFailure, "time-segmentation model not found; pass --model or --first/--last/--roi/--flow");
      }
      meta = auto_configure(*source, load_model(model_path), model_path);
    }
  }

  if (a.first) meta.first_frame = *a.first;
  if (a.last) meta.last_frame = *a.last;
  if (a.first && a.last) meta.needs_manual.window = false;
  if (a.stride) meta.frame_stride = *a.stride;
  if (!a.roi.empty()) {
    const auto v = parse_ints(a.roi, 4, "--roi");
    meta.roi = {v[0], v[1], v[2], v[3]};
    meta.needs_manual.roi = false;
  }
  if (!a.flow.empty()) meta.flow = parse_flow(a.flow);
  if (!a.method.empty()) {
    const SegmentationMethod m = parse_method(a.method);
    if (m == SegmentationMethod::Gray) {
      meta.segmentation = SegmentationConfig::gray(a.gray_threshold.value_or(128));
    } else if (m == SegmentationMethod::Hsv) {
      meta.segmentation.method = SegmentationMethod::Hsv;
      meta.segmentation.sample_ranges = SegmentationConfig::preset_sample_ranges();
      meta.segmentation.shock_ranges = SegmentationConfig::preset_shock_ranges();
    } else if (m == SegmentationMethod::AutoHsv) {
      meta.segmentation = SegmentationConfig::auto_hsv();
    } else {
      throw Error(ErrorCode::UsageError, "the plugin method is only available through the library");
    }
  }
  if (a.gray_threshold) meta.segmentation.gray_threshold = *a.gray_threshold;
  if (!a.sample_hsv.empty()) {
    meta.segmentation.sample_ranges.clear();
    for (const auto& s : a.sample_hsv) meta.segmentation.sample_ranges.push_back(parse_hsv(s));
  }
  if (!a.shock_hsv.empty()) {
    meta.segmentation.shock_ranges.clear();
    for (const auto& s : a.shock_hsv) meta.segmentation.shock_ranges.push_back(parse_hsv(s));
  }
  if (a.lof_k) meta.lof.k = *a.lof_k;
  if (a.lof_threshold) meta.lof.threshold = *a.lof_threshold;

  if (meta.needs_manual.window) {
    std::cerr << "error: no ON window detected; pass --first and --last\n";
    return kExitProcessing;
  }
  if (meta.needs_manual.roi) {
    std::cerr << "error: nothing segmented for the ROI; pass --roi\n";
    return kExitProcessing;
  }
  meta.validate(source->frame_count(), source->width(), source->height());
  if (!a.save_meta.empty()) save_meta(meta, a.save_meta);

  ProcessOptions po;
  po.threads = a.threads;
  if (!a.quiet) {
    po.progress = [](int done, int total) {
      std::cerr << "\rframe " << done << "/" << total << std::flush;
      if (done == total) std::cerr << "\n";
    };
  }
  const EdgesFile edges = process(*source, meta, po);
  write_edges_file(edges, a.out);

  if (!a.quiet) {
    std::cerr << "window [" << meta.first_frame << ", " << meta.last_frame << "] stride " << meta.frame_stride
              << ", " << edges.frames.size() << " frames, " << edges.rejected_frames().size() << " rejected -> "
              << a.out << "\n";
  }
  return 0;
}

struct AnalyzeArgs {
  std::vector<std::string> edges;
  double diameter_mm = 0.0;
  std::optional<double> diameter_px;
  std::vector<double> stations;
  std::string out;
};

int run_analyze(const AnalyzeArgs& a) {
  if (a.edges.empty()) throw Error(ErrorCode::UsageError, "no edges files given");
  Calibration cal{a.diameter_mm, a.diameter_px};
  cal.validate();
  std::vector<fs::path> paths(a.edges.begin(), a.edges.end());
  const auto stations = a.stations.empty() ? default_stations() : a.stations;
  const AnalysisSummary s = analyze(paths, cal, stations, a.out);

  std::cout << "frames kept: " << s.bundle.size() << ", mm/px " << format_number(s.bundle.mm_per_px) << "\n";
  for (const ChannelFit& f : s.fits) {
    std::cout << f.channel << ": ";
    if (f.fit) {
      std::cout << "slope " << format_number(f.fit->slope) << " +- " << format_number(f.fit->slope_stderr)
                << " /s, r2 " << format_number(f.fit->r_squared);
    } else {
      std::cout << "no fit";
    }
    std::cout << " (n=" << f.n_points << ")\n";
  }
  std::cout << "wrote " << s.series_csv.string() << " and " << s.fits_csv.string() << "\n";
  return 0;
}

struct TrainArgs {
  int samples = 1000;
  int epochs = 40;
  std::uint64_t seed = 42;
  std::string out;
  bool quiet = false;
};

int run_train(const TrainArgs& a) {
  TrainConfig tc;
  tc.dataset_size = a.samples;
  tc.epochs = a.epochs;
  tc.seed = a.seed;
  tc.validate();
  const Conv1DNet init = Conv1DNet::initialized(Conv1DNetShape{}, a.seed);
  auto report = [&](int epoch, double loss, double acc) {
    if (!a.quiet) std::cerr << "epoch " << epoch + 1 << "/" << a.epochs << " loss " << loss << " val_acc " << acc << "\n";
  };
  try {
    const TrainReport r = train(init, tc, SyntheticSignalConfig{}, report);
    save_model(r.final_net, a.out);
    std::cout << "validation accuracy " << r.val_accuracy_curve.back() << ", training accuracy "
              << r.final_train_accuracy << " -> " << a.out << "\n";
  } catch (const TrainDiverged& e) {
    std::cerr << "error: " << e.what() << " after " << e.partial().loss_curve.size() << " epochs\n";
    return kExitProcessing;
  }
  return 0;
}

int run_synth(const std::string& config, const std::string& out) {
  SynthVideoConfig cfg;
  if (!config.empty()) {
    std::ifstream is(config);
    if (!is) throw Error(ErrorCode::IoFailure, "cannot read " + config);
    try {
      cfg = nlohmann::json::parse(is).get<SynthVideoConfig>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ConfigInvalid, config + ": " + e.what());
    }
  }
  const SyntheticVideo v = generate_synthetic_video(cfg, out);
  std::cout << v.source.frame_count() << " frames (" << v.source.width() << "x" << v.source.height() << ") -> "
            << v.source.manifest_path().string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arcjet test-video analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  ProcessArgs pa;
  auto* process_cmd = app.add_subcommand("process", "segment frames and write edges JSON");
  process_cmd->add_option("manifest", pa.manifest, "frame manifest JSON");
  process_cmd->add_option("--meta", pa.meta_path, "processing meta JSON to run as-is (overrides still apply)");
  process_cmd->add_option("--method", pa.method, "auto-hsv | hsv | gray")
      ->check(CLI::IsMember({"auto-hsv", "hsv", "gray"}));
  process_cmd->add_option("--first", pa.first, "first frame of the window");
  process_cmd->add_option("--last", pa.last, "last frame of the window");
  process_cmd->add_option("--stride", pa.stride, "process every K-th frame (default 10)");
  process_cmd->add_option("--roi", pa.roi, "X,Y,W,H");
  process_cmd->add_option("--flow", pa.flow, "left | right")->check(CLI::IsMember({"left", "right"}));
  process_cmd->add_option("--model", pa.model, "time-segmentation model JSON");
  process_cmd->add_option("--sample-hsv", pa.sample_hsv, "h_lo,h_hi,s_lo,s_hi,v_lo,v_hi (repeatable)");
  process_cmd->add_option("--shock-hsv", pa.shock_hsv, "h_lo,h_hi,s_lo,s_hi,v_lo,v_hi (repeatable)");
  process_cmd->add_option("--gray-threshold", pa.gray_threshold, "luma threshold for --method gray");
  process_cmd->add_option("--lof-k", pa.lof_k, "LOF neighbours");
  process_cmd->add_option("--lof-threshold", pa.lof_threshold, "LOF rejection threshold");
  process_cmd->add_option("--threads", pa.threads, "worker threads")->check(CLI::PositiveNumber);
  process_cmd->add_option("--out", pa.out, "edges JSON output");
  process_cmd->add_option("--save-meta", pa.save_meta, "also write the effective meta JSON");
  process_cmd->add_flag("-q,--quiet", pa.quiet);

  AnalyzeArgs aa;
  auto* analyze_cmd = app.add_subcommand("analyze", "time series, fits and CSV export");
  analyze_cmd->add_option("edges", aa.edges, "edges JSON files; later files win on shared frames")->required();
  analyze_cmd->add_option("--diameter-mm", aa.diameter_mm, "physical sample diameter")->required();
  analyze_cmd->add_option("--diameter-px", aa.diameter_px, "sample diameter in pixels (default: from first kept frame)");
  analyze_cmd->add_option("--stations", aa.stations, "radial stations as fractions of the radius")->delimiter(',');
  analyze_cmd->add_option("--out", aa.out, "output prefix")->required();

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train-timeseg", "train the time-segmentation network on synthetic signals");
  train_cmd->add_option("--samples", ta.samples, "synthetic dataset size");
  train_cmd->add_option("--epochs", ta.epochs, "training epochs");
  train_cmd->add_option("--seed", ta.seed, "random seed");
  train_cmd->add_option("--out", ta.out, "model JSON output")->required();
  train_cmd->add_flag("-q,--quiet", ta.quiet);

  std::string synth_config, synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "render a synthetic arcjet video with ground truth");
  synth_cmd->add_option("--config", synth_config, "synthetic video config JSON (defaults if omitted)");
  synth_cmd->add_option("--out", synth_out, "output directory")->required();

  ServiceOptions so;
  std::string serve_manifest;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP API for the browser UI");
  serve_cmd->add_option("--port", so.port, "listen port");
  serve_cmd->add_option("--host", so.host, "listen address");
  serve_cmd->add_option("--static", so.static_dir, "directory of UI assets to serve at /");
  serve_cmd->add_option("--model", so.default_model_path, "time-segmentation model for /api/autoconfig");
  serve_cmd->add_option("--manifest", serve_manifest, "video to open in the default session");
  serve_cmd->add_option("--threads", so.process_threads, "worker threads per processing job");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*process_cmd) return run_process(pa);
    if (*analyze_cmd) return run_analyze(aa);
    if (*train_cmd) return run_train(ta);
    if (*synth_cmd) return run_synth(synth_config, synth_out);
    if (*serve_cmd) {
      so.default_model_path = resolve_model(so.default_model_path);
      so.initial_manifest = serve_manifest;
      Service svc(so);
      const int port = svc.bind();
      std::cerr << "listening on http://" << so.host << ":" << port << "\n";
      svc.run();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProcessing;
  }
  return kExitUsage;
}

#include "arcjet/service.hpp"

#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "arcjet/error.hpp"
#include "arcjet/pipeline.hpp"

namespace arcjet {

using nlohmann::json;

namespace {

struct Session {
  std::mutex mutex;  // guards every field below except the atomics
  std::optional<FrameSource> source;
  std::optional<ProcessingMeta> meta;
  std::optional<EdgesFile> results;
  std::string last_error;
  std::thread worker;

  std::atomic<bool> busy{false};
  std::atomic<int> done{0};
  std::atomic<int> total{0};
  std::atomic<bool> cancel{false};

  ~Session() {
    cancel = true;
    if (worker.joinable()) worker.join();
  }
};

/// Holds the session's busy flag for one mutating request.
class BusyGuard {
 public:
  explicit BusyGuard(Session& s) : s_(s) {
    bool expected = false;
    acquired_ = s_.busy.compare_exchange_strong(expected, true);
  }
  ~BusyGuard() {
    if (acquired_ && !released_) s_.busy = false;
  }
  bool acquired() const { return acquired_; }
  void hand_off() { released_ = true; }

 private:
  Session& s_;
  bool acquired_ = false;
  bool released_ = false;
};

struct HttpError {
  int status;
  std::string code;
  std::string message;
};

int status_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::MissingManifest:
      return 404;
    case ErrorCode::IoFailure:
    case ErrorCode::DecodeFailure:
      return 500;
    default:
      return 400;
  }
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  send_json(res, {{"error", code}, {"message", message}}, status);
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw HttpError{400, "malformed_json", e.what()};
  }
}

json source_info(const FrameSource& s) {
  return {{"manifest", s.manifest_path().string()}, {"frame_count", s.frame_count()},
          {"width", s.width()},                     {"height", s.height()},
          {"fps", s.fps()},                         {"tool_version", tool_version()}};
}

std::array<std::uint8_t, 3> class_color(PixelClass c) {
  switch (c) {
    case PixelClass::Sample:
      return {255, 165, 0};
    case PixelClass::SampleEdge:
      return {0, 255, 0};
    case PixelClass::Shock:
      return {160, 80, 255};
    default:
      return {0, 0, 0};
  }
}

json trace_points(const EdgeTrace& t) {
  json a = json::array();
  for (const auto& p : t.points) a.push_back(json::array({p.x, p.y}));
  return a;
}

std::string read_file_bytes(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoFailure, "cannot read " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  httplib::Server server;
  std::mutex sessions_mutex;
  std::map<std::string, std::unique_ptr<Session>> sessions;
  std::mutex model_mutex;
  std::map<std::string, Conv1DNet> models;

  Session& session_for(const httplib::Request& req) {
    std::string id = req.get_header_value("X-Session");
    if (id.empty()) id = "default";
    std::lock_guard lock(sessions_mutex);
    auto& slot = sessions[id];
    if (!slot) slot = std::make_unique<Session>();
    return *slot;
  }

  const Conv1DNet& model(const std::string& path) {
    std::lock_guard lock(model_mutex);
    auto it = models.find(path);
    if (it == models.end()) it = models.emplace(path, load_model(path)).first;
    return it->second;
  }

  static const FrameSource& require_source(Session& s) {
    if (!s.source) throw HttpError{409, "no_source", "no video opened in this session"};
    return *s.source;
  }

  // Wraps a handler with JSON error mapping.
  template <class F>
  httplib::Server::Handler wrap(F f) {
    return [this, f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(session_for(req), req, res);
      } catch (const HttpError& e) {
        send_error(res, e.status, e.code, e.message);
      } catch (const Error& e) {
        send_error(res, status_for(e.code()), std::string(to_string(e.code())), e.what());
      } catch (const json::exception& e) {
        send_error(res, 400, "malformed_request", e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
      }
    };
  }

  void routes() {
    server.Post("/api/open", wrap([](Session& s, const httplib::Request& req, httplib::Response& res) {
      BusyGuard guard(s);
      if (!guard.acquired()) throw HttpError{409, "busy", "session is busy"};
      const json body = parse_body(req);
      if (!body.contains("manifest")) throw HttpError{400, "missing_field", "manifest"};
      FrameSource src = FrameSource::open(body["manifest"].get<std::string>());
      std::lock_guard lock(s.mutex);
      s.source = std::move(src);
      s.meta.reset();
      s.results.reset();
      send_json(res, source_info(*s.source));
    }));

    server.Get("/api/info", wrap([](Session& s, const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(s.mutex);
      json info = source_info(require_source(s));
      info["has_meta"] = s.meta.has_value();
      info["has_results"] = s.results.has_value();
      send_json(res, info);
    }));

    server.Get(R"(/api/frame/(-?\d+))", wrap([](Session& s, const httplib::Request& req, httplib::Response& res) {
      std::filesystem::path path;
      {
        std::lock_guard lock(s.mutex);
        const FrameSource& src = require_source(s);
        const int i = std::stoi(req.matches[1].str());
        path = src.frame_path(i);
      }
      res.set_content(read_file_bytes(path), "image/png");
    }));

    server.Get("/api/brightness", wrap([](Session& s, const httplib::Request& req, httplib::Response& res) {
      std::optional<FrameSource> src;
      {
        std::lock_guard lock(s.mutex);
        src = require_source(s);
      }
      int stride = 1;
      if (req.has_param("stride")) stride = std::stoi(req.get_param_value("stride"));
      const BrightnessTrace t = compute_brightness_trace(*src, stride);
      send_json(res, {{"frame_indices", t.frame_indices}, {"values", t.values}, {"raw", t.raw}});
    }));

    server.Post("/api/autoconfig", wrap([this](Session& s, const httplib::Request& req, httplib::Response& res) {
      BusyGuard guard(s);
      if (!guard.acquired()) throw HttpError{409, "busy", "session is busy"};
      const json body = parse_body(req);
      std::optional<FrameSource> src;
      {
        std::lock_guard lock(s.mutex);
        src = require_source(s);
      }
      const std::string path = body.value("model_path", options.default_model_path);
      if (path.empty()) throw HttpError{400, "missing_field", "model_path"};
      ProcessingMeta m = auto_configure(*src, model(path), path);
      std::lock_guard lock(s.mutex);
      s.meta = m;
      send_json(res, json(m));
    }));

    server.Get("/api/meta", wrap([](Session& s, const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(s.mutex);
      if (!s.meta) throw HttpError{404, "no_meta", "no meta in this session"};
      send_json(res, json(*s.meta));
    }));

    server.Put("/api/meta", wrap([](Session& s, const httplib::Request& req, httplib::Response& res) {
      BusyGuard guard(s);
      if (!guard.acquired()) throw HttpError{409, "busy", "session is busy"};
      const ProcessingMeta m = parse_body(req).get<ProcessingMeta>();
      std::lock_guard lock(s.mutex);
      const FrameSource& src = require_source(s);
      m.validate(src.frame_count(), src.width(), src.height());
      s.meta = m;
      send_json(res, json(m));
    }));

    server.Post("/api/preview", wrap([](Session& s, const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      std::optional<FrameSource> src;
      std::optional<ProcessingMeta> meta;
      {
        std::lock_guard lock(s.mutex);
        src = require_source(s);
        meta = s.meta;
      }
      if (!body.contains("frame_index")) throw HttpError{400, "missing_field", "frame_index"};
      const int index = body["frame_index"].get<int>();
      SegmentationConfig seg = meta ? meta->segmentation : SegmentationConfig::auto_hsv();
      if (body.contains("segmentation")) seg = body["segmentation"].get<SegmentationConfig>();
      seg.validate();
      Roi roi = meta ? meta->roi : Roi::full(src->width(), src->height());
      if (body.contains("roi")) {
        const json& r = body["roi"];
        roi = {r.at("x").get<int>(), r.at("y").get<int>(), r.at("w").get<int>(), r.at("h").get<int>()};
      }
      FlowDirection flow = meta ? meta->flow : FlowDirection::Right;
      if (body.contains("flow")) flow = parse_flow(body["flow"].get<std::string>());

      const Frame frame = src->get_frame(index);
      const FrameAnalysis fa = analyze_frame(frame.image, index, roi, flow, seg);
      RgbImage overlay(fa.mask.width, fa.mask.height);
      for (int y = 0; y < fa.mask.height; ++y) {
        for (int x = 0; x < fa.mask.width; ++x) {
          const auto c = class_color(fa.mask.at(x, y));
          std::copy(c.begin(), c.end(), overlay.at(x, y));
        }
      }
      const auto png_bytes = png::encode(overlay);
      json out = {{"frame_index", index},
                  {"roi", {{"x", roi.x}, {"y", roi.y}, {"w", roi.w}, {"h", roi.h}}},
                  {"mask_png_base64", httplib::detail::base64_encode(std::string(png_bytes.begin(), png_bytes.end()))},
                  {"sample_edge", trace_points(fa.sample_edge)},
                  {"shock_edge", fa.shock_edge ? trace_points(*fa.shock_edge) : json(nullptr)},
                  {"class_counts",
                   {{"background", fa.mask.count(PixelClass::Background)},
                    {"sample", fa.mask.count(PixelClass::Sample)},
                    {"sample_edge", fa.mask.count(PixelClass::SampleEdge)},
                    {"shock", fa.mask.count(PixelClass::Shock)}}}};
      send_json(res, out);
    }));

    server.Post("/api/process", wrap([this](Session& s, const httplib::Request& req, httplib::Response& res) {
      BusyGuard guard(s);
      if (!guard.acquired()) throw HttpError{409, "busy", "session is busy"};
      const json body = parse_body(req);
      std::lock_guard lock(s.mutex);
      const FrameSource& src = require_source(s);
      if (!s.meta) throw HttpError{409, "no_meta", "set or autoconfigure a meta first"};
      s.meta->validate(src.frame_count(), src.width(), src.height());
      if (s.worker.joinable()) s.worker.join();
      s.done = 0;
      s.total = static_cast<int>(s.meta->frame_indices().size());
      s.cancel = false;
      s.last_error.clear();
      s.results.reset();
      const int threads = body.value("threads", options.process_threads);
      guard.hand_off();
      s.worker = std::thread([&s, src = src, meta = *s.meta, threads] {
        ProcessOptions po;
        po.threads = threads;
        po.cancel = &s.cancel;
        po.progress = [&s](int d, int) { s.done = d; };
        std::optional<EdgesFile> result;
        std::string err;
        try {
          result = process(src, meta, po);
        } catch (const std::exception& e) {
          err = e.what();
        }
        {
          std::lock_guard inner(s.mutex);
          s.results = std::move(result);
          s.last_error = err;
        }
        s.busy = false;
      });
      send_json(res, {{"status", "started"}, {"total", s.total.load()}}, 202);
    }));

    server.Get("/api/progress", wrap([](Session& s, const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(s.mutex);
      json out = {{"running", s.busy.load()}, {"done", s.done.load()}, {"total", s.total.load()},
                  {"has_results", s.results.has_value()}, {"error", nullptr}};
      if (!s.last_error.empty()) out["error"] = s.last_error;
      send_json(res, out);
    }));

    server.Get("/api/results", wrap([](Session& s, const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(s.mutex);
      if (!s.results) throw HttpError{404, "no_results", s.busy ? "processing in progress" : "nothing processed"};
      res.status = 200;
      res.set_content(dump_json(*s.results), "application/json");
    }));

    server.Post("/api/analyze", wrap([](Session& s, const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      if (!body.contains("diameter_mm")) throw HttpError{400, "missing_field", "diameter_mm"};
      Calibration cal;
      cal.model_diameter_mm = body["diameter_mm"].get<double>();
      if (body.contains("diameter_px") && !body["diameter_px"].is_null()) {
        cal.measured_diameter_px = body["diameter_px"].get<double>();
      }
      std::vector<double> stations = default_stations();
      if (body.contains("stations")) stations = body["stations"].get<std::vector<double>>();

      std::vector<EdgesFile> files;
      if (body.contains("edges_paths")) {
        for (const auto& p : body["edges_paths"]) files.push_back(read_edges_file(p.get<std::string>()));
      } else {
        std::lock_guard lock(s.mutex);
        if (!s.results) throw HttpError{409, "no_results", "process the video first"};
        files.push_back(*s.results);
      }
      const AnalysisSummary summary = analyze(files, cal, stations, body.value("out_prefix", std::string{}));
      json out = to_json(summary);
      out["series_csv"] = series_csv(summary.bundle);
      out["fits_csv"] = fits_csv(summary.fits);
      send_json(res, out);
    }));

    if (!options.static_dir.empty()) {
      if (!server.set_mount_point("/", options.static_dir)) {
        throw Error(ErrorCode::IoFailure, "static directory not found: " + options.static_dir);
      }
    }
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  impl_->routes();
  if (!impl_->options.initial_manifest.empty()) {
    auto s = std::make_unique<Session>();
    s->source = FrameSource::open(impl_->options.initial_manifest);
    impl_->sessions["default"] = std::move(s);
  }
}

Service::~Service() {
  stop();
  std::lock_guard lock(impl_->sessions_mutex);
  impl_->sessions.clear();
}

int Service::bind() {
  const auto& o = impl_->options;
  if (o.port == 0) {
    const int p = impl_->server.bind_to_any_port(o.host);
    if (p < 0) throw Error(ErrorCode::IoFailure, "cannot bind " + o.host);
    return p;
  }
  if (!impl_->server.bind_to_port(o.host, o.port)) {
    throw Error(ErrorCode::IoFailure, "cannot bind " + o.host + ":" + std::to_string(o.port) + " (port busy?)");
  }
  return o.port;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void serve(const ServiceOptions& options) {
  Service svc(options);
  svc.bind();
  svc.run();
}

}  // namespace arcjet

#include "arcjet/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "arcjet/error.hpp"
#include "arcjet/pipeline.hpp"

namespace arcjet {

void Calibration::validate() const {
  if (!(model_diameter_mm > 0) || !std::isfinite(model_diameter_mm)) {
    throw Error(ErrorCode::ConfigInvalid, "model diameter must be > 0");
  }
  if (measured_diameter_px && (!(*measured_diameter_px > 0) || !std::isfinite(*measured_diameter_px))) {
    throw Error(ErrorCode::ConfigInvalid, "measured diameter must be > 0");
  }
}

double Calibration::mm_per_px() const {
  validate();
  if (!measured_diameter_px) throw Error(ErrorCode::ConfigInvalid, "measured diameter not set");
  return model_diameter_mm / *measured_diameter_px;
}

void to_json(nlohmann::json& j, const Calibration& c) {
  j = {{"model_diameter_mm", c.model_diameter_mm}, {"measured_diameter_px", nullptr}};
  if (c.measured_diameter_px) j["measured_diameter_px"] = *c.measured_diameter_px;
}

void from_json(const nlohmann::json& j, Calibration& c) {
  c.model_diameter_mm = j.at("model_diameter_mm").get<double>();
  c.measured_diameter_px.reset();
  if (j.contains("measured_diameter_px") && !j["measured_diameter_px"].is_null()) {
    c.measured_diameter_px = j["measured_diameter_px"].get<double>();
  }
}

std::vector<double> default_stations() { return {-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75}; }

LinearFitResult linear_fit(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  if (n != y.size()) throw Error(ErrorCode::DegenerateInput, "t and y differ in length");
  if (n < 2) throw Error(ErrorCode::DegenerateInput, "linear fit needs at least two points");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(y[i])) throw Error(ErrorCode::NonFinite, "non-finite fit input");
  }
  const double dn = static_cast<double>(n);
  double tbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tbar += t[i];
    ybar += y[i];
  }
  tbar /= dn;
  ybar /= dn;
  double sxx = 0.0, sxy = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = t[i] - tbar;
    const double dy = y[i] - ybar;
    sxx += dt * dt;
    sxy += dt * dy;
    sst += dy * dy;
  }
  if (!(sxx > 0)) throw Error(ErrorCode::DegenerateAbscissa, "all abscissae are equal");

  LinearFitResult r;
  r.n_points = static_cast<int>(n);
  r.slope = sxy / sxx;
  r.intercept = ybar - r.slope * tbar;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double res = y[i] - (r.intercept + r.slope * t[i]);
    ssr += res * res;
  }
  const double sigma2 = n > 2 ? ssr / (dn - 2.0) : 0.0;
  r.slope_stderr = std::sqrt(sigma2 / sxx);
  r.intercept_stderr = std::sqrt(sigma2 * (1.0 / dn + tbar * tbar / sxx));
  r.r_squared = sst > 0 ? std::clamp(1.0 - ssr / sst, 0.0, 1.0) : 1.0;
  return r;
}

double compute_standoff(const EdgeTrace& sample, const EdgeTrace& shock, double y_center) {
  const auto xs = sample.x_at(y_center);
  const auto xk = shock.x_at(y_center);
  if (!xs || !xk) throw Error(ErrorCode::MissingEdge, "edge missing at the centre row");
  return std::abs(*xs - *xk);
}

std::string format_number(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string station_channel_name(double station) { return "recession_mm@" + format_number(station); }

std::vector<std::string> TimeSeriesBundle::channel_names() const {
  std::vector<std::string> names;
  for (double s : stations) names.push_back(station_channel_name(s));
  names.insert(names.end(), {"area_mm2", "standoff_mm", "vertical_mm"});
  return names;
}

const Series& TimeSeriesBundle::channel(const std::string& name) const {
  if (name == "area_mm2") return area_mm2;
  if (name == "standoff_mm") return standoff_mm;
  if (name == "vertical_mm") return vertical_mm;
  for (std::size_t s = 0; s < stations.size(); ++s) {
    if (name == station_channel_name(stations[s])) return recession_mm[s];
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown channel '" + name + "'");
}

std::vector<FrameRecord> merge_frames(std::span<const EdgesFile> files) {
  std::map<int, FrameRecord> by_index;
  for (const EdgesFile& f : files) {
    if (f.width != files.front().width || f.height != files.front().height) {
      throw Error(ErrorCode::InconsistentDimensions, "edges files have different frame sizes");
    }
    if (f.meta.flow != files.front().meta.flow) {
      throw Error(ErrorCode::InconsistentDimensions, "edges files have different flow directions");
    }
    for (const FrameRecord& r : f.frames) by_index.insert_or_assign(r.index, r);
  }
  std::vector<FrameRecord> out;
  out.reserve(by_index.size());
  for (auto& [idx, rec] : by_index) out.push_back(std::move(rec));
  return out;
}

namespace {

double mean_y(const EdgeTrace& trace) {
  double s = 0.0;
  for (const auto& p : trace.points) s += p.y;
  return s / static_cast<double>(trace.points.size());
}

}  // namespace

TimeSeriesBundle build_time_series(std::span<const EdgesFile> files, const Calibration& calibration,
                                   std::span<const double> stations) {
  calibration.validate();
  if (files.empty()) throw Error(ErrorCode::NoKeptFrames, "no edges files");
  const std::vector<FrameRecord> merged = merge_frames(files);

  std::vector<const FrameRecord*> kept;
  for (const FrameRecord& r : merged) {
    if (!r.rejected && r.usable()) kept.push_back(&r);
  }
  if (kept.empty()) throw Error(ErrorCode::NoKeptFrames, "every frame was rejected or failed");

  TimeSeriesBundle b;
  b.flow = files.front().meta.flow;
  b.stations.assign(stations.begin(), stations.end());

  const FrameRecord& ref = *kept.front();
  const int y_min = ref.sample_edge.points.front().y;
  const int y_max = ref.sample_edge.points.back().y;
  b.reference_frame = ref.index;
  b.center_y = 0.5 * (y_min + y_max);
  b.radius_px = 0.5 * (y_max - y_min);
  b.measured_diameter_px = calibration.measured_diameter_px.value_or(double(y_max - y_min + 1));
  const double s = calibration.model_diameter_mm / b.measured_diameter_px;
  b.mm_per_px = s;
  const double sign = upstream_sign(b.flow);

  std::vector<std::optional<double>> ref_x;
  for (double f : b.stations) ref_x.push_back(ref.sample_edge.x_at(b.center_y + f * b.radius_px));
  const double ref_centroid = mean_y(ref.sample_edge);

  b.recession_mm.assign(b.stations.size(), {});
  for (const FrameRecord* r : kept) {
    b.frame_indices.push_back(r->index);
    b.time_s.push_back(r->time_s);
    for (std::size_t k = 0; k < b.stations.size(); ++k) {
      const auto x = r->sample_edge.x_at(b.center_y + b.stations[k] * b.radius_px);
      std::optional<double> v;
      if (x && ref_x[k]) v = s * sign * (*ref_x[k] - *x);
      b.recession_mm[k].push_back(v);
    }
    b.area_mm2.push_back(r->features.sample_area_px * s * s);
    std::optional<double> standoff;
    if (r->shock_edge) {
      try {
        standoff = s * compute_standoff(r->sample_edge, *r->shock_edge, b.center_y);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::MissingEdge) throw;
      }
    }
    b.standoff_mm.push_back(standoff);
    b.vertical_mm.push_back(s * (mean_y(r->sample_edge) - ref_centroid));
  }
  return b;
}

ChannelFit fit_channel(const TimeSeriesBundle& bundle, const std::string& channel, double t_lo, double t_hi) {
  const Series& series = bundle.channel(channel);
  std::vector<double> t, y;
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    if (!series[i] || bundle.time_s[i] < t_lo || bundle.time_s[i] > t_hi) continue;
    t.push_back(bundle.time_s[i]);
    y.push_back(*series[i]);
  }
  ChannelFit out{channel, std::nullopt, static_cast<int>(t.size())};
  if (t.size() >= 2) {
    try {
      out.fit = linear_fit(t, y);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateAbscissa) throw;
    }
  }
  return out;
}

std::vector<ChannelFit> fit_all(const TimeSeriesBundle& bundle) {
  std::vector<ChannelFit> fits;
  for (const auto& name : bundle.channel_names()) fits.push_back(fit_channel(bundle, name));
  return fits;
}

std::string series_csv(const TimeSeriesBundle& bundle) {
  const auto names = bundle.channel_names();
  std::vector<const Series*> cols;
  for (const auto& n : names) cols.push_back(&bundle.channel(n));

  std::string out = "time_s";
  for (const auto& n : names) out += "," + n;
  out += "\n";
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    out += format_number(bundle.time_s[i]);
    for (const Series* c : cols) {
      out += ",";
      if ((*c)[i]) out += format_number(*(*c)[i]);
    }
    out += "\n";
  }
  return out;
}

std::string fits_csv(std::span<const ChannelFit> fits) {
  std::string out = "channel,slope,slope_stderr,intercept,intercept_stderr,r_squared,n_points\n";
  for (const ChannelFit& f : fits) {
    out += f.channel;
    if (f.fit) {
      for (double v : {f.fit->slope, f.fit->slope_stderr, f.fit->intercept, f.fit->intercept_stderr,
                       f.fit->r_squared}) {
        out += "," + format_number(v);
      }
    } else {
      out += ",,,,,";
    }
    out += "," + std::to_string(f.n_points) + "\n";
  }
  return out;
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoFailure, "cannot write " + path);
  os << text;
  if (!os) throw Error(ErrorCode::IoFailure, "write failed: " + path);
}

nlohmann::json series_json(const Series& s) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& v : s) a.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  return a;
}

}  // namespace

void export_csv(const TimeSeriesBundle& bundle, std::span<const ChannelFit> fits, const std::string& prefix) {
  if (bundle.size() == 0) throw Error(ErrorCode::NoKeptFrames, "empty bundle");
  write_text(prefix + "_series.csv", series_csv(bundle));
  write_text(prefix + "_fits.csv", fits_csv(fits));
}

nlohmann::json to_json(const TimeSeriesBundle& b) {
  nlohmann::json channels = nlohmann::json::object();
  for (const auto& name : b.channel_names()) channels[name] = series_json(b.channel(name));
  return {{"frame_index", b.frame_indices},
          {"time_s", b.time_s},
          {"stations", b.stations},
          {"channels", channels},
          {"mm_per_px", b.mm_per_px},
          {"measured_diameter_px", b.measured_diameter_px},
          {"center_y", b.center_y},
          {"radius_px", b.radius_px},
          {"reference_frame", b.reference_frame},
          {"flow", std::string(to_string(b.flow))}};
}

nlohmann::json to_json(std::span<const ChannelFit> fits) {
  nlohmann::json a = nlohmann::json::array();
  for (const ChannelFit& f : fits) {
    nlohmann::json j = {{"channel", f.channel}, {"n_points", f.n_points}};
    if (f.fit) {
      j["slope"] = f.fit->slope;
      j["slope_stderr"] = f.fit->slope_stderr;
      j["intercept"] = f.fit->intercept;
      j["intercept_stderr"] = f.fit->intercept_stderr;
      j["r_squared"] = f.fit->r_squared;
    } else {
      for (const char* k : {"slope", "slope_stderr", "intercept", "intercept_stderr", "r_squared"}) j[k] = nullptr;
    }
    a.push_back(std::move(j));
  }
  return a;
}

}  // namespace arcjet

#include "arcjet/timeseg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace arcjet {

using nlohmann::json;
using nn::Tensor;

// ---------------------------------------------------------------------------
// Brightness traces
// ---------------------------------------------------------------------------

std::vector<double> normalize_min_max(std::span<const double> raw) {
  std::vector<double> out(raw.size(), 0.0);
  if (raw.empty()) return out;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - *lo) / range;
  return out;
}

BrightnessTrace compute_brightness_trace(const FrameSource& source, int stride) {
  if (stride < 1) throw Error(ErrorCode::ConfigInvalid, "stride must be >= 1");
  if (source.frame_count() < 1) throw Error(ErrorCode::EmptySource, "source has no frames");
  BrightnessTrace trace;
  for (int i = 0; i < source.frame_count(); i += stride) {
    const Frame f = source.get_frame(i);
    double sum = 0.0;
    const std::uint8_t* p = f.image.pixels.data();
    const std::size_t n = static_cast<std::size_t>(f.width()) * f.height();
    for (std::size_t k = 0; k < n; ++k, p += 3) sum += luminance_exact(p);
    trace.raw.push_back(sum / static_cast<double>(n));
    trace.frame_indices.push_back(i);
  }
  trace.values = normalize_min_max(trace.raw);
  return trace;
}

// ---------------------------------------------------------------------------
// Synthetic labelled signals
// ---------------------------------------------------------------------------

void SyntheticSignalConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::ConfigInvalid, why); };
  if (length < 16) fail("signal length must be >= 16");
  auto unit = [](double lo, double hi) { return lo >= 0 && hi <= 1 && lo <= hi; };
  if (!unit(off_lo, off_hi) || !unit(on_lo, on_hi) || !unit(spike_lo, spike_hi)) {
    fail("amplitude ranges must lie in [0,1]");
  }
  if (spike_width_lo < 1 || spike_width_lo > spike_width_hi) fail("bad spike width range");
  if (!(t_on_lo >= 0 && t_on_lo <= t_on_hi)) fail("bad t_on range");
  if (!(t_on_hi + min_on_fraction <= t_off_hi && t_off_hi < 1.0)) fail("t_on < t_off < length violated");
  if (noise_lo < 0 || noise_lo > noise_hi) fail("bad noise range");
  if (smoothing_windows.empty()) fail("need at least one smoothing window");
  for (int w : smoothing_windows) {
    if (w < 1 || w % 2 == 0) fail("smoothing windows must be odd and positive");
  }
  if (margin < 0) fail("margin must be >= 0");
}

SignalParams draw_signal_params(const SyntheticSignalConfig& cfg, std::mt19937_64& rng) {
  auto uni = [&](double lo, double hi) { return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto uni_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int len = cfg.length;
  SignalParams p;
  p.off_level = uni(cfg.off_lo, cfg.off_hi);
  p.on_level = uni(cfg.on_lo, cfg.on_hi);
  p.spike_level = std::max(p.on_level, uni(cfg.spike_lo, cfg.spike_hi));
  p.spike_width = uni_int(cfg.spike_width_lo, cfg.spike_width_hi);
  p.t_on = uni_int(static_cast<int>(std::lround(cfg.t_on_lo * len)), static_cast<int>(std::lround(cfg.t_on_hi * len)));
  p.t_off = uni_int(p.t_on + static_cast<int>(std::lround(cfg.min_on_fraction * len)),
                    static_cast<int>(std::lround(cfg.t_off_hi * len)));
  p.noise_sigma = uni(cfg.noise_lo, cfg.noise_hi);
  p.smoothing = cfg.smoothing_windows[static_cast<std::size_t>(uni_int(0, int(cfg.smoothing_windows.size()) - 1))];
  return p;
}

std::vector<int> signal_labels(int length, const SignalParams& p, int margin) {
  std::vector<int> labels(static_cast<std::size_t>(length), static_cast<int>(TimeSegClass::Off));
  for (int t = 0; t < length; ++t) {
    const bool near_on = std::abs(t - p.t_on) <= margin;
    const bool near_off = std::abs(t - p.t_off) <= margin;
    const bool in_spike = t >= p.t_on && t < p.t_on + p.spike_width;
    int c = static_cast<int>(TimeSegClass::Off);
    if (near_on || near_off || in_spike) {
      c = static_cast<int>(TimeSegClass::Transition);
    } else if (t > p.t_on + margin && t < p.t_off - margin) {
      c = static_cast<int>(TimeSegClass::On);
    }
    labels[static_cast<std::size_t>(t)] = c;
  }
  return labels;
}

LabeledSignal render_signal(const SyntheticSignalConfig& cfg, const SignalParams& p, std::mt19937_64& rng) {
  const int len = cfg.length;
  std::vector<double> clean(static_cast<std::size_t>(len));
  for (int t = 0; t < len; ++t) {
    double v = p.off_level;
    if (t >= p.t_on && t < p.t_off) v = p.on_level;
    if (t >= p.t_on && t < p.t_on + p.spike_width) v = p.spike_level;
    clean[static_cast<std::size_t>(t)] = v;
  }
  if (p.noise_sigma > 0) {
    std::normal_distribution<double> noise(0.0, p.noise_sigma);
    for (double& v : clean) v += noise(rng);
  }
  // Centred moving average; the window shrinks at the ends.
  const int half = p.smoothing / 2;
  LabeledSignal out;
  out.signal.resize(static_cast<std::size_t>(len));
  for (int t = 0; t < len; ++t) {
    double sum = 0.0;
    int n = 0;
    for (int k = std::max(0, t - half); k <= std::min(len - 1, t + half); ++k, ++n) sum += clean[static_cast<std::size_t>(k)];
    out.signal[static_cast<std::size_t>(t)] = std::clamp(sum / n, 0.0, 1.0);
  }
  out.labels = signal_labels(len, p, cfg.margin);
  out.params = p;
  return out;
}

LabeledSignal generate_synthetic_signal(const SyntheticSignalConfig& cfg, std::uint64_t index) {
  cfg.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  const SignalParams p = draw_signal_params(cfg, rng);
  return render_signal(cfg, p, rng);
}

// ---------------------------------------------------------------------------
// Conv1DNet
// ---------------------------------------------------------------------------

Conv1DNet::Conv1DNet(const Conv1DNetShape& shape) : shape_(shape) {
  const auto& c = shape.channels;
  const int k = shape.kernel;
  const int pad = k / 2;
  conv1 = nn::Conv1d(c[0], c[1], k, 2, pad);
  conv2 = nn::Conv1d(c[1], c[2], k, 2, pad);
  tconv1 = nn::ConvTranspose1d(c[2], c[3], k, 2, pad, 1);
  tconv2 = nn::ConvTranspose1d(c[3], c[4], k, 2, pad, 1);
  tconv3 = nn::ConvTranspose1d(c[4], c[5], k, 1, pad, 0);
}

Conv1DNet Conv1DNet::initialized(const Conv1DNetShape& shape, std::uint64_t seed) {
  Conv1DNet net(shape);
  std::mt19937_64 rng(seed);
  auto fill = [&](std::vector<double>& v, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& x : v) x = dist(rng);
  };
  fill(net.conv1.weight, net.conv1.in * net.conv1.kernel);
  fill(net.conv1.bias, net.conv1.in * net.conv1.kernel);
  fill(net.conv2.weight, net.conv2.in * net.conv2.kernel);
  fill(net.conv2.bias, net.conv2.in * net.conv2.kernel);
  for (auto* t : {&net.tconv1, &net.tconv2, &net.tconv3}) {
    fill(t->weight, t->out * t->kernel);
    fill(t->bias, t->out * t->kernel);
  }
  return net;
}

std::vector<std::span<double>> Conv1DNet::parameters() {
  return {conv1.weight, conv1.bias, conv2.weight, conv2.bias, tconv1.weight,
          tconv1.bias,  tconv2.weight, tconv2.bias, tconv3.weight, tconv3.bias};
}

std::vector<std::span<const double>> Conv1DNet::parameters() const {
  return {conv1.weight, conv1.bias, conv2.weight, conv2.bias, tconv1.weight,
          tconv1.bias,  tconv2.weight, tconv2.bias, tconv3.weight, tconv3.bias};
}

Conv1DNet Conv1DNet::zeros_like() const { return Conv1DNet(shape_); }

bool Conv1DNet::operator==(const Conv1DNet& other) const {
  if (shape_.input_length != other.shape_.input_length || shape_.channels != other.shape_.channels ||
      shape_.kernel != other.shape_.kernel || shape_.dropout_p != other.shape_.dropout_p) {
    return false;
  }
  const auto a = parameters();
  const auto b = other.parameters();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    // Bitwise comparison so that NaN payloads and signed zeros count.
    if (std::memcmp(a[i].data(), b[i].data(), a[i].size() * sizeof(double)) != 0) return false;
  }
  return true;
}

Tensor net_forward(const Conv1DNet& net, std::span<const double> signal, NetMode mode, std::mt19937_64* rng,
                   ForwardCache* cache) {
  if (static_cast<int>(signal.size()) != net.input_length()) {
    throw Error(ErrorCode::WrongLength, "expected " + std::to_string(net.input_length()) + " samples, got " +
                                            std::to_string(signal.size()));
  }
  for (double v : signal) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "signal contains NaN or inf");
  }
  const bool train = mode == NetMode::Train && net.dropout_p() > 0.0;
  if (train && !rng) throw Error(ErrorCode::ConfigInvalid, "TRAIN mode needs an rng for dropout");

  Tensor x(1, net.input_length());
  std::copy(signal.begin(), signal.end(), x.data.begin());

  Tensor a1 = net.conv1.forward(x);
  Tensor d1 = a1;
  nn::relu_inplace(d1);
  std::vector<double> drop1, drop2;
  if (train) drop1 = nn::dropout_inplace(d1, net.dropout_p(), *rng);

  Tensor a2 = net.conv2.forward(d1);
  Tensor d2 = a2;
  nn::relu_inplace(d2);
  if (train) drop2 = nn::dropout_inplace(d2, net.dropout_p(), *rng);

  Tensor a3 = net.tconv1.forward(d2);
  Tensor r3 = a3;
  nn::relu_inplace(r3);
  Tensor a4 = net.tconv2.forward(r3);
  Tensor r4 = a4;
  nn::relu_inplace(r4);
  Tensor logits = net.tconv3.forward(r4);
  Tensor probs = nn::softmax_channels(logits);

  if (cache) {
    cache->input = std::move(x);
    cache->a1 = std::move(a1);
    cache->d1 = std::move(d1);
    cache->a2 = std::move(a2);
    cache->d2 = std::move(d2);
    cache->a3 = std::move(a3);
    cache->r3 = std::move(r3);
    cache->a4 = std::move(a4);
    cache->r4 = std::move(r4);
    cache->logits = std::move(logits);
    cache->drop1 = std::move(drop1);
    cache->drop2 = std::move(drop2);
  }
  return probs;
}

void net_backward(const Conv1DNet& net, const ForwardCache& c, const Tensor& grad_logits, Conv1DNet& g) {
  Tensor gr4 = net.tconv3.backward(c.r4, grad_logits, g.tconv3.weight, g.tconv3.bias);
  nn::relu_backward_inplace(c.a4, gr4);
  Tensor gr3 = net.tconv2.backward(c.r3, gr4, g.tconv2.weight, g.tconv2.bias);
  nn::relu_backward_inplace(c.a3, gr3);
  Tensor gd2 = net.tconv1.backward(c.d2, gr3, g.tconv1.weight, g.tconv1.bias);
  if (!c.drop2.empty()) {
    for (std::size_t k = 0; k < gd2.data.size(); ++k) gd2.data[k] *= c.drop2[k];
  }
  nn::relu_backward_inplace(c.a2, gd2);
  Tensor gd1 = net.conv2.backward(c.d1, gd2, g.conv2.weight, g.conv2.bias);
  if (!c.drop1.empty()) {
    for (std::size_t k = 0; k < gd1.data.size(); ++k) gd1.data[k] *= c.drop1[k];
  }
  nn::relu_backward_inplace(c.a1, gd1);
  net.conv1.backward(c.input, gd1, g.conv1.weight, g.conv1.bias);
}

std::vector<int> argmax_labels(const Tensor& probs) {
  std::vector<int> out(static_cast<std::size_t>(probs.length));
  for (int t = 0; t < probs.length; ++t) {
    int best = 0;
    for (int c = 1; c < probs.channels; ++c) {
      if (probs(c, t) > probs(best, t)) best = c;
    }
    out[static_cast<std::size_t>(t)] = best;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::ConfigInvalid, why); };
  if (epochs < 1) fail("epochs must be >= 1");
  if (dataset_size < 2) fail("dataset_size must be >= 2");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(learning_rate > 0)) fail("learning_rate must be > 0");
  if (!(validation_fraction > 0 && validation_fraction < 1)) fail("validation_fraction must be in (0,1)");
}

double evaluate_accuracy(const Conv1DNet& net, std::span<const LabeledSignal> data) {
  std::size_t correct = 0, total = 0;
  for (const auto& s : data) {
    const auto pred = argmax_labels(net_forward(net, s.signal, NetMode::Eval));
    for (std::size_t t = 0; t < pred.size(); ++t) correct += pred[t] == s.labels[t];
    total += pred.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

TrainReport train(const Conv1DNet& initial, const TrainConfig& tc, const SyntheticSignalConfig& signal_cfg,
                  const EpochCallback& on_epoch) {
  tc.validate();
  SyntheticSignalConfig scfg = signal_cfg;
  scfg.seed = tc.seed;
  scfg.length = initial.input_length();
  scfg.validate();

  std::vector<LabeledSignal> data;
  data.reserve(static_cast<std::size_t>(tc.dataset_size));
  for (int i = 0; i < tc.dataset_size; ++i) data.push_back(generate_synthetic_signal(scfg, static_cast<std::uint64_t>(i)));

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 split_rng(tc.seed ^ 0x5bd1e995ULL);
  std::shuffle(order.begin(), order.end(), split_rng);
  const auto n_val = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(tc.validation_fraction * static_cast<double>(data.size()))), 1,
      data.size() - 1);
  std::vector<LabeledSignal> val;
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  for (std::size_t k = 0; k < n_val; ++k) val.push_back(data[order[k]]);

  TrainReport report;
  report.final_net = initial;
  Conv1DNet& net = report.final_net;
  Conv1DNet grads = net.zeros_like();

  std::vector<std::size_t> sizes;
  for (auto p : net.parameters()) sizes.push_back(p.size());
  nn::Adam adam(sizes, tc.learning_rate);

  std::mt19937_64 shuffle_rng(tc.seed ^ 0x9e3779b97f4a7c15ULL);
  std::mt19937_64 dropout_rng(tc.seed ^ 0xc2b2ae3d27d4eb4fULL);
  ForwardCache cache;
  Tensor grad_logits;

  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < train_idx.size(); start += static_cast<std::size_t>(tc.batch_size)) {
      const std::size_t end = std::min(train_idx.size(), start + static_cast<std::size_t>(tc.batch_size));
      for (auto g : grads.parameters()) std::fill(g.begin(), g.end(), 0.0);
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t b = start; b < end; ++b) {
        const LabeledSignal& s = data[train_idx[b]];
        net_forward(net, s.signal, NetMode::Train, &dropout_rng, &cache);
        const double loss = nn::softmax_cross_entropy(cache.logits, s.labels, &grad_logits, scale);
        loss_sum += loss;
        net_backward(net, cache, grad_logits, grads);
      }
      if (!std::isfinite(loss_sum)) {
        report.diverged = true;
        throw TrainDiverged("non-finite loss in epoch " + std::to_string(epoch), std::move(report));
      }
      auto params = net.parameters();
      auto gparams = grads.parameters();
      adam.step(params, gparams);
    }
    const double mean_loss = loss_sum / static_cast<double>(train_idx.size());
    const double acc = evaluate_accuracy(net, val);
    report.loss_curve.push_back(mean_loss);
    report.val_accuracy_curve.push_back(acc);
    if (on_epoch) on_epoch(epoch, mean_loss, acc);
  }

  std::vector<LabeledSignal> train_set;
  for (std::size_t k : train_idx) train_set.push_back(data[k]);
  report.final_train_accuracy = evaluate_accuracy(net, train_set);
  return report;
}

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

std::vector<double> resample_linear(std::span<const double> values, int length) {
  std::vector<double> out(static_cast<std::size_t>(length));
  const std::size_t n = values.size();
  if (n == 0) return out;
  if (n == 1 || length == 1) {
    std::fill(out.begin(), out.end(), values[0]);
    return out;
  }
  for (int k = 0; k < length; ++k) {
    const double pos = k * static_cast<double>(n - 1) / (length - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), n - 2);
    const double f = pos - static_cast<double>(i);
    out[static_cast<std::size_t>(k)] = values[i] * (1.0 - f) + values[i + 1] * f;
  }
  return out;
}

InterestWindow infer_interest_window(const Conv1DNet& net, const BrightnessTrace& trace) {
  const std::size_t n = trace.values.size();
  if (n < 8) throw Error(ErrorCode::WrongLength, "trace needs at least 8 samples, got " + std::to_string(n));
  if (trace.frame_indices.size() != n) throw Error(ErrorCode::WrongLength, "trace values/indices length mismatch");

  const int len = net.input_length();
  const auto resampled = resample_linear(trace.values, len);
  const auto labels = argmax_labels(net_forward(net, resampled, NetMode::Eval));

  InterestWindow out;
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(std::lround(static_cast<double>(i) * (len - 1) / static_cast<double>(n - 1)));
    out.labels[i] = labels[k];
  }
  const int on = static_cast<int>(TimeSegClass::On);
  std::size_t best_start = 0, best_len = 0;
  for (std::size_t i = 0; i < n;) {
    if (out.labels[i] != on) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && out.labels[j] == on) ++j;
    if (j - i > best_len) {
      best_len = j - i;
      best_start = i;
    }
    i = j;
  }
  if (best_len == 0) throw Error(ErrorCode::NoOnRegion, "no ON frames detected");
  out.first_frame = trace.frame_indices[best_start];
  out.last_frame = trace.frame_indices[best_start + best_len - 1];
  return out;
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

namespace {

json conv_layer(const char* name, const nn::Conv1d& c) {
  return {{"name", name}, {"kind", "conv1d"}, {"in", c.in}, {"out", c.out}, {"kernel", c.kernel},
          {"stride", c.stride}, {"padding", c.padding}, {"output_padding", 0},
          {"weights", c.weight}, {"bias", c.bias}};
}

json tconv_layer(const char* name, const nn::ConvTranspose1d& c) {
  return {{"name", name}, {"kind", "conv_transpose1d"}, {"in", c.in}, {"out", c.out}, {"kernel", c.kernel},
          {"stride", c.stride}, {"padding", c.padding}, {"output_padding", c.output_padding},
          {"weights", c.weight}, {"bias", c.bias}};
}

void read_layer(const json& j, const char* name, const char* kind, int in, int out, int kernel, int stride, int pad,
                int out_pad, std::vector<double>& weight, std::vector<double>& bias) {
  auto mismatch = [&](const std::string& why) {
    throw Error(ErrorCode::SchemaMismatch, std::string("layer ") + name + ": " + why);
  };
  if (j.value("name", std::string()) != name) mismatch("unexpected layer name");
  if (j.value("kind", std::string()) != kind) mismatch("unexpected layer kind");
  if (j.value("in", -1) != in || j.value("out", -1) != out || j.value("kernel", -1) != kernel ||
      j.value("stride", -1) != stride || j.value("padding", -1) != pad || j.value("output_padding", -1) != out_pad) {
    mismatch("layer geometry does not match the architecture");
  }
  auto w = j.at("weights").get<std::vector<double>>();
  auto b = j.at("bias").get<std::vector<double>>();
  if (w.size() != weight.size() || b.size() != bias.size()) mismatch("wrong number of weights");
  weight = std::move(w);
  bias = std::move(b);
}

}  // namespace

json model_to_json(const Conv1DNet& net) {
  const auto& s = net.shape();
  return {{"schema", "conv1dnet/1"},
          {"input_length", s.input_length},
          {"channels", s.channels},
          {"kernel", s.kernel},
          {"dropout_p", s.dropout_p},
          {"layers",
           {conv_layer("conv1", net.conv1), conv_layer("conv2", net.conv2), tconv_layer("tconv1", net.tconv1),
            tconv_layer("tconv2", net.tconv2), tconv_layer("tconv3", net.tconv3)}}};
}

Conv1DNet model_from_json(const json& j) {
  try {
    if (!j.is_object() || j.value("schema", std::string()) != "conv1dnet/1") {
      throw Error(ErrorCode::SchemaMismatch, "missing or unknown schema tag");
    }
    Conv1DNetShape shape;
    shape.input_length = j.value("input_length", shape.input_length);
    if (j.contains("channels")) shape.channels = j.at("channels").get<std::array<int, 6>>();
    shape.kernel = j.value("kernel", shape.kernel);
    shape.dropout_p = j.value("dropout_p", shape.dropout_p);
    if (shape.input_length < 8 || shape.input_length % 4 != 0 || shape.kernel < 1 || shape.kernel % 2 == 0) {
      throw Error(ErrorCode::SchemaMismatch, "unsupported architecture");
    }
    Conv1DNet net(shape);
    const json& layers = j.at("layers");
    if (!layers.is_array() || layers.size() != 5) throw Error(ErrorCode::SchemaMismatch, "expected 5 layers");
    auto rc = [&](std::size_t k, const char* name, nn::Conv1d& c) {
      read_layer(layers[k], name, "conv1d", c.in, c.out, c.kernel, c.stride, c.padding, 0, c.weight, c.bias);
    };
    auto rt = [&](std::size_t k, const char* name, nn::ConvTranspose1d& c) {
      read_layer(layers[k], name, "conv_transpose1d", c.in, c.out, c.kernel, c.stride, c.padding, c.output_padding,
                 c.weight, c.bias);
    };
    rc(0, "conv1", net.conv1);
    rc(1, "conv2", net.conv2);
    rt(2, "tconv1", net.tconv1);
    rt(3, "tconv2", net.tconv2);
    rt(4, "tconv3", net.tconv3);
    for (auto p : net.parameters()) {
      for (double v : p) {
        if (!std::isfinite(v)) throw Error(ErrorCode::SchemaMismatch, "non-finite weight");
      }
    }
    return net;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, e.what());
  }
}

void save_model(const Conv1DNet& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << model_to_json(net).dump() << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "short write " + path.string());
}

Conv1DNet load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace arcjet

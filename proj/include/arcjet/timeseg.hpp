#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "json.hpp"

#include "arcjet/error.hpp"
#include "arcjet/frames.hpp"
#include "arcjet/nn.hpp"

namespace arcjet {

// ---------------------------------------------------------------------------
// Brightness traces
// ---------------------------------------------------------------------------

struct BrightnessTrace {
  std::vector<double> values;  // min-max normalised to [0,1]; all zero if the raw trace is constant
  std::vector<int> frame_indices;
  std::vector<double> raw;     // mean luma per sampled frame, before normalisation
};

/// Min-max normalisation; constant input maps to all zeros.
std::vector<double> normalize_min_max(std::span<const double> raw);

/// Mean luma of frames 0, stride, 2*stride, ... then min-max normalised.
/// Throws Error{EmptySource} / Error{ConfigInvalid} for stride < 1.
BrightnessTrace compute_brightness_trace(const FrameSource& source, int stride = 10);

// ---------------------------------------------------------------------------
// Synthetic labelled signals
// ---------------------------------------------------------------------------

enum class TimeSegClass : int { Off = 0, Transition = 1, On = 2 };

struct SyntheticSignalConfig {
  int length = 256;
  double off_lo = 0.0, off_hi = 0.15;
  double on_lo = 0.3, on_hi = 0.9;
  double spike_lo = 0.5, spike_hi = 1.0;
  int spike_width_lo = 1, spike_width_hi = 5;
  double t_on_lo = 0.1, t_on_hi = 0.4;   // fractions of length
  double min_on_fraction = 0.2;          // t_off >= t_on + this * length
  double t_off_hi = 0.9;
  double noise_lo = 0.005, noise_hi = 0.05;
  std::vector<int> smoothing_windows{3, 5, 7};
  int margin = 3;
  std::uint64_t seed = 0;

  void validate() const;
};

/// The drawn parameters of one signal, exposed for tests and reproducibility.
struct SignalParams {
  double off_level = 0, on_level = 0, spike_level = 0, noise_sigma = 0;
  int spike_width = 1, t_on = 0, t_off = 0, smoothing = 1;
};

struct LabeledSignal {
  std::vector<double> signal;
  std::vector<int> labels;  // TimeSegClass codes
  SignalParams params;
};

SignalParams draw_signal_params(const SyntheticSignalConfig& cfg, std::mt19937_64& rng);
/// Deterministic rendering of given parameters: plateaus, spike, Gaussian
/// noise from `rng`, moving-average smoothing, clipping to [0,1].
LabeledSignal render_signal(const SyntheticSignalConfig& cfg, const SignalParams& params, std::mt19937_64& rng);
std::vector<int> signal_labels(int length, const SignalParams& params, int margin);
/// Signal number `index` of the stream keyed by cfg.seed (independent per index).
LabeledSignal generate_synthetic_signal(const SyntheticSignalConfig& cfg, std::uint64_t index = 0);

// ---------------------------------------------------------------------------
// Conv1DNet
// ---------------------------------------------------------------------------

struct Conv1DNetShape {
  int input_length = 256;
  std::array<int, 6> channels{1, 32, 16, 16, 8, 3};
  int kernel = 7;
  double dropout_p = 0.25;
};

enum class NetMode { Train, Eval };

/// conv(s2) -> ReLU -> dropout -> conv(s2) -> ReLU -> dropout ->
/// tconv(s2, op1) -> ReLU -> tconv(s2, op1) -> ReLU -> tconv(s1) -> softmax.
class Conv1DNet {
 public:
  Conv1DNet() : Conv1DNet(Conv1DNetShape{}) {}
  explicit Conv1DNet(const Conv1DNetShape& shape);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation.
  static Conv1DNet initialized(const Conv1DNetShape& shape, std::uint64_t seed);

  const Conv1DNetShape& shape() const { return shape_; }
  int input_length() const { return shape_.input_length; }
  double dropout_p() const { return shape_.dropout_p; }

  nn::Conv1d conv1, conv2;
  nn::ConvTranspose1d tconv1, tconv2, tconv3;

  /// Ten buffers: (weight, bias) for conv1, conv2, tconv1, tconv2, tconv3.
  std::vector<std::span<double>> parameters();
  std::vector<std::span<const double>> parameters() const;
  Conv1DNet zeros_like() const;

  bool operator==(const Conv1DNet& other) const;

 private:
  Conv1DNetShape shape_;
};

/// Intermediate activations kept for backprop.
struct ForwardCache {
  nn::Tensor input;
  nn::Tensor a1, d1;  // conv1 pre-activation, post-dropout
  nn::Tensor a2, d2;
  nn::Tensor a3, r3;
  nn::Tensor a4, r4;
  nn::Tensor logits;
  std::vector<double> drop1, drop2;
};

/// Class probabilities (3 x length). Throws Error{WrongLength} when the
/// signal length differs from the net's input length and Error{NonFiniteInput}
/// on NaN/inf. Dropout is applied only in TRAIN mode and requires `rng`.
nn::Tensor net_forward(const Conv1DNet& net, std::span<const double> signal, NetMode mode,
                       std::mt19937_64* rng = nullptr, ForwardCache* cache = nullptr);

/// Backprop of dL/dlogits through the cached forward pass, accumulating into `grads`.
void net_backward(const Conv1DNet& net, const ForwardCache& cache, const nn::Tensor& grad_logits, Conv1DNet& grads);

std::vector<int> argmax_labels(const nn::Tensor& probs);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainConfig {
  int epochs = 40;
  int dataset_size = 1000;
  int batch_size = 16;
  double learning_rate = 1e-3;
  double validation_fraction = 0.2;
  std::uint64_t seed = 42;

  void validate() const;
};

struct TrainReport {
  std::vector<double> loss_curve;          // mean training loss per epoch
  std::vector<double> val_accuracy_curve;  // per-timestep validation accuracy per epoch
  double final_train_accuracy = 0.0;
  bool diverged = false;
  Conv1DNet final_net;
};

/// Raised when the training loss becomes non-finite; carries the epochs
/// completed so far.
class TrainDiverged : public Error {
 public:
  TrainDiverged(const std::string& what, TrainReport partial)
      : Error(ErrorCode::DivergedLoss, what), partial_(std::move(partial)) {}
  const TrainReport& partial() const { return partial_; }

 private:
  TrainReport partial_;
};

using EpochCallback = std::function<void(int epoch, double loss, double val_accuracy)>;

/// Generates the dataset from signal_cfg (seed from train_cfg), splits it,
/// and minimises mean per-timestep cross-entropy with Adam. Single-threaded
/// and bit-reproducible. Throws TrainDiverged on a non-finite loss.
TrainReport train(const Conv1DNet& net, const TrainConfig& train_cfg, const SyntheticSignalConfig& signal_cfg,
                  const EpochCallback& on_epoch = {});

/// Per-timestep accuracy of EVAL-mode argmax against labels.
double evaluate_accuracy(const Conv1DNet& net, std::span<const LabeledSignal> data);

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

std::vector<double> resample_linear(std::span<const double> values, int length);

struct InterestWindow {
  int first_frame = 0;
  int last_frame = 0;
  std::vector<int> labels;  // per sampled frame of the input trace
};

/// Resamples the trace to the net length, labels it, maps labels back by
/// nearest neighbour and returns the longest contiguous ON run (earliest on
/// ties). Throws Error{NoOnRegion} when nothing is ON and Error{WrongLength}
/// for traces shorter than 8 samples.
InterestWindow infer_interest_window(const Conv1DNet& net, const BrightnessTrace& trace);

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

nlohmann::json model_to_json(const Conv1DNet& net);
Conv1DNet model_from_json(const nlohmann::json& j);
void save_model(const Conv1DNet& net, const std::filesystem::path& path);
/// Throws Error{IoFailure} if unreadable, Error{SchemaMismatch} for a
/// truncated file, wrong schema tag or wrong layer shapes.
Conv1DNet load_model(const std::filesystem::path& path);

}  // namespace arcjet

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

// Minimal 1D convolution toolkit for the time-segmentation network. Tensors
// are channel-major [channels][length] doubles; one sample at a time, with
// gradients accumulated across a batch by the caller.
namespace arcjet::nn {

struct Tensor {
  int channels = 0;
  int length = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int c, int l, double fill = 0.0)
      : channels(c), length(l), data(static_cast<std::size_t>(c) * l, fill) {}

  double& operator()(int c, int t) { return data[static_cast<std::size_t>(c) * length + t]; }
  double operator()(int c, int t) const { return data[static_cast<std::size_t>(c) * length + t]; }
  double* channel(int c) { return data.data() + static_cast<std::size_t>(c) * length; }
  const double* channel(int c) const { return data.data() + static_cast<std::size_t>(c) * length; }
};

/// out[o][t] = bias[o] + sum_i sum_j weight[o][i][j] * in[i][t*stride + j - padding]
struct Conv1d {
  int in = 0, out = 0, kernel = 0, stride = 1, padding = 0;
  std::vector<double> weight;  // [out][in][kernel]
  std::vector<double> bias;    // [out]

  Conv1d() = default;
  Conv1d(int in_ch, int out_ch, int k, int s, int p);

  int output_length(int input_length) const { return (input_length + 2 * padding - kernel) / stride + 1; }
  double& w(int o, int i, int j) { return weight[(static_cast<std::size_t>(o) * in + i) * kernel + j]; }
  double w(int o, int i, int j) const { return weight[(static_cast<std::size_t>(o) * in + i) * kernel + j]; }

  Tensor forward(const Tensor& x) const;
  /// Accumulates dL/dweight and dL/dbias into grad_w / grad_b, returns dL/dx.
  Tensor backward(const Tensor& x, const Tensor& grad_y, std::span<double> grad_w, std::span<double> grad_b) const;
};

/// Transposed convolution (the adjoint of Conv1d's input map):
/// out[o][t*stride + j - padding] += weight[i][o][j] * in[i][t]
struct ConvTranspose1d {
  int in = 0, out = 0, kernel = 0, stride = 1, padding = 0, output_padding = 0;
  std::vector<double> weight;  // [in][out][kernel]
  std::vector<double> bias;    // [out]

  ConvTranspose1d() = default;
  ConvTranspose1d(int in_ch, int out_ch, int k, int s, int p, int op);

  int output_length(int input_length) const {
    return (input_length - 1) * stride - 2 * padding + kernel + output_padding;
  }
  double& w(int i, int o, int j) { return weight[(static_cast<std::size_t>(i) * out + o) * kernel + j]; }
  double w(int i, int o, int j) const { return weight[(static_cast<std::size_t>(i) * out + o) * kernel + j]; }

  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& x, const Tensor& grad_y, std::span<double> grad_w, std::span<double> grad_b) const;
};

void relu_inplace(Tensor& x);
/// grad *= (pre_activation > 0)
void relu_backward_inplace(const Tensor& pre_activation, Tensor& grad);

/// Inverted dropout: keeps each element with probability 1-p and rescales by
/// 1/(1-p). Returns the applied per-element scale (0 or 1/(1-p)).
std::vector<double> dropout_inplace(Tensor& x, double p, std::mt19937_64& rng);

/// Softmax over channels at each time step, max-shifted.
Tensor softmax_channels(const Tensor& logits);

/// Mean over time of -log p[label[t]][t] (p = softmax(logits)); writes
/// d(loss)/d(logits) * grad_scale into grad when non-null.
double softmax_cross_entropy(const Tensor& logits, std::span<const int> labels, Tensor* grad, double grad_scale = 1.0);

/// Adaptive moment estimation over a fixed list of parameter buffers.
class Adam {
 public:
  Adam(std::vector<std::size_t> sizes, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(std::span<const std::span<double>> params, std::span<const std::span<double>> grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  long step_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace arcjet::nn

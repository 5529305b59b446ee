#include "arcjet/nn.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace arcjet::nn {

namespace {

// Range of t with 0 <= t*stride + offset < limit, intersected with [0, count).
inline void valid_range(int offset, int stride, int limit, int count, int& lo, int& hi) {
  lo = offset >= 0 ? 0 : (-offset + stride - 1) / stride;
  hi = (limit - 1 - offset) >= 0 ? (limit - 1 - offset) / stride + 1 : 0;
  hi = std::min(hi, count);
  lo = std::min(lo, hi);
}

}  // namespace

Conv1d::Conv1d(int in_ch, int out_ch, int k, int s, int p)
    : in(in_ch), out(out_ch), kernel(k), stride(s), padding(p),
      weight(static_cast<std::size_t>(out_ch) * in_ch * k, 0.0), bias(static_cast<std::size_t>(out_ch), 0.0) {}

Tensor Conv1d::forward(const Tensor& x) const {
  assert(x.channels == in);
  const int lout = output_length(x.length);
  Tensor y(out, lout);
  for (int o = 0; o < out; ++o) {
    double* yo = y.channel(o);
    std::fill(yo, yo + lout, bias[static_cast<std::size_t>(o)]);
    for (int i = 0; i < in; ++i) {
      const double* xi = x.channel(i);
      for (int j = 0; j < kernel; ++j) {
        const double wv = w(o, i, j);
        const int off = j - padding;
        int lo, hi;
        valid_range(off, stride, x.length, lout, lo, hi);
        for (int t = lo; t < hi; ++t) yo[t] += wv * xi[t * stride + off];
      }
    }
  }
  return y;
}

Tensor Conv1d::backward(const Tensor& x, const Tensor& gy, std::span<double> grad_w, std::span<double> grad_b) const {
  Tensor gx(in, x.length);
  for (int o = 0; o < out; ++o) {
    const double* go = gy.channel(o);
    double sum = 0.0;
    for (int t = 0; t < gy.length; ++t) sum += go[t];
    grad_b[static_cast<std::size_t>(o)] += sum;
    for (int i = 0; i < in; ++i) {
      const double* xi = x.channel(i);
      double* gxi = gx.channel(i);
      for (int j = 0; j < kernel; ++j) {
        const double wv = w(o, i, j);
        const int off = j - padding;
        int lo, hi;
        valid_range(off, stride, x.length, gy.length, lo, hi);
        double gw = 0.0;
        for (int t = lo; t < hi; ++t) {
          gw += go[t] * xi[t * stride + off];
          gxi[t * stride + off] += wv * go[t];
        }
        grad_w[(static_cast<std::size_t>(o) * in + i) * kernel + j] += gw;
      }
    }
  }
  return gx;
}

ConvTranspose1d::ConvTranspose1d(int in_ch, int out_ch, int k, int s, int p, int op)
    : in(in_ch), out(out_ch), kernel(k), stride(s), padding(p), output_padding(op),
      weight(static_cast<std::size_t>(in_ch) * out_ch * k, 0.0), bias(static_cast<std::size_t>(out_ch), 0.0) {}

Tensor ConvTranspose1d::forward(const Tensor& x) const {
  assert(x.channels == in);
  const int lout = output_length(x.length);
  Tensor y(out, lout);
  for (int o = 0; o < out; ++o) std::fill(y.channel(o), y.channel(o) + lout, bias[static_cast<std::size_t>(o)]);
  for (int i = 0; i < in; ++i) {
    const double* xi = x.channel(i);
    for (int o = 0; o < out; ++o) {
      double* yo = y.channel(o);
      for (int j = 0; j < kernel; ++j) {
        const double wv = w(i, o, j);
        const int off = j - padding;
        int lo, hi;
        valid_range(off, stride, lout, x.length, lo, hi);
        for (int t = lo; t < hi; ++t) yo[t * stride + off] += wv * xi[t];
      }
    }
  }
  return y;
}

Tensor ConvTranspose1d::backward(const Tensor& x, const Tensor& gy, std::span<double> grad_w,
                                 std::span<double> grad_b) const {
  Tensor gx(in, x.length);
  for (int o = 0; o < out; ++o) {
    const double* go = gy.channel(o);
    double sum = 0.0;
    for (int u = 0; u < gy.length; ++u) sum += go[u];
    grad_b[static_cast<std::size_t>(o)] += sum;
  }
  for (int i = 0; i < in; ++i) {
    const double* xi = x.channel(i);
    double* gxi = gx.channel(i);
    for (int o = 0; o < out; ++o) {
      const double* go = gy.channel(o);
      for (int j = 0; j < kernel; ++j) {
        const double wv = w(i, o, j);
        const int off = j - padding;
        int lo, hi;
        valid_range(off, stride, gy.length, x.length, lo, hi);
        double gw = 0.0;
        for (int t = lo; t < hi; ++t) {
          const double g = go[t * stride + off];
          gw += g * xi[t];
          gxi[t] += wv * g;
        }
        grad_w[(static_cast<std::size_t>(i) * out + o) * kernel + j] += gw;
      }
    }
  }
  return gx;
}

void relu_inplace(Tensor& x) {
  for (double& v : x.data) v = v > 0.0 ? v : 0.0;
}

void relu_backward_inplace(const Tensor& pre, Tensor& grad) {
  for (std::size_t k = 0; k < grad.data.size(); ++k) {
    if (!(pre.data[k] > 0.0)) grad.data[k] = 0.0;
  }
}

std::vector<double> dropout_inplace(Tensor& x, double p, std::mt19937_64& rng) {
  std::vector<double> scale(x.data.size(), 1.0);
  if (p <= 0.0) return scale;
  std::bernoulli_distribution keep(1.0 - p);
  const double s = 1.0 / (1.0 - p);
  for (std::size_t k = 0; k < x.data.size(); ++k) {
    scale[k] = keep(rng) ? s : 0.0;
    x.data[k] *= scale[k];
  }
  return scale;
}

Tensor softmax_channels(const Tensor& logits) {
  Tensor p(logits.channels, logits.length);
  for (int t = 0; t < logits.length; ++t) {
    double mx = logits(0, t);
    for (int c = 1; c < logits.channels; ++c) mx = std::max(mx, logits(c, t));
    double sum = 0.0;
    for (int c = 0; c < logits.channels; ++c) {
      p(c, t) = std::exp(logits(c, t) - mx);
      sum += p(c, t);
    }
    for (int c = 0; c < logits.channels; ++c) p(c, t) /= sum;
  }
  return p;
}

double softmax_cross_entropy(const Tensor& logits, std::span<const int> labels, Tensor* grad, double grad_scale) {
  const Tensor p = softmax_channels(logits);
  double loss = 0.0;
  const double inv_len = 1.0 / logits.length;
  if (grad) *grad = Tensor(logits.channels, logits.length);
  for (int t = 0; t < logits.length; ++t) {
    const int label = labels[static_cast<std::size_t>(t)];
    // log-softmax directly for accuracy at confident predictions
    double mx = logits(0, t);
    for (int c = 1; c < logits.channels; ++c) mx = std::max(mx, logits(c, t));
    double sum = 0.0;
    for (int c = 0; c < logits.channels; ++c) sum += std::exp(logits(c, t) - mx);
    loss -= logits(label, t) - mx - std::log(sum);
    if (grad) {
      for (int c = 0; c < logits.channels; ++c) {
        (*grad)(c, t) = (p(c, t) - (c == label ? 1.0 : 0.0)) * inv_len * grad_scale;
      }
    }
  }
  return loss * inv_len;
}

Adam::Adam(std::vector<std::size_t> sizes, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (std::size_t n : sizes) {
    m_.emplace_back(n, 0.0);
    v_.emplace_back(n, 0.0);
  }
}

void Adam::step(std::span<const std::span<double>> params, std::span<const std::span<double>> grads) {
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto& m = m_[b];
    auto& v = v_[b];
    for (std::size_t k = 0; k < params[b].size(); ++k) {
      const double g = grads[b][k];
      m[k] = beta1_ * m[k] + (1.0 - beta1_) * g;
      v[k] = beta2_ * v[k] + (1.0 - beta2_) * g * g;
      params[b][k] -= lr_ * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps_);
    }
  }
}

}  // namespace arcjet::nn

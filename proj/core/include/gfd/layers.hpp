#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfd/rng.hpp"
#include "gfd/tensor.hpp"

// Building blocks for the fusion network. Activations are NCHW tensors.
//
// Each layer offers:
//   forward(x)        inference; const, touches no cached state
//   forward_train(x)  training-mode pass that caches what backward needs
//   backward(dy)      returns dL/dx and accumulates parameter gradients
// backward() without a preceding forward_train() throws NoForwardCache.
namespace gfd::nn {

class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_h,
         std::size_t kernel_w, std::size_t stride, std::size_t pad_h, std::size_t pad_w);

  Tensor forward(const Tensor& x) const;
  Tensor forward_train(const Tensor& x);
  Tensor backward(const Tensor& dy);

  /// He-uniform weights, fan-in uniform bias.
  void init(Rng& rng);
  void collect(const std::string& prefix, StateRefs& refs);

  std::size_t in_channels() const noexcept { return in_; }
  std::size_t out_channels() const noexcept { return out_; }

  /// Keeps only the listed output / input channels (ascending indices).
  void keep_output_channels(std::span<const std::size_t> keep);
  void keep_input_channels(std::span<const std::size_t> keep);

  Parameter weight;  // [out, in, kh, kw]
  Parameter bias;    // [out]

 private:
  std::size_t out_size(std::size_t in, std::size_t k, std::size_t pad) const;
  void im2col(const double* x, std::size_t h, std::size_t w, std::size_t oh, std::size_t ow,
              double* cols) const;

  std::size_t in_ = 0, out_ = 0, kh_ = 1, kw_ = 1, stride_ = 1, ph_ = 0, pw_ = 0;
  std::optional<Tensor> cached_input_;
};

class BatchNorm2d {
 public:
  BatchNorm2d() = default;
  explicit BatchNorm2d(std::size_t channels, double eps = 1e-5, double momentum = 0.1);

  Tensor forward(const Tensor& x) const;
  Tensor forward_train(const Tensor& x);
  Tensor backward(const Tensor& dy);

  void collect(const std::string& prefix, StateRefs& refs);
  void keep_channels(std::span<const std::size_t> keep);
  std::size_t channels() const noexcept { return gamma.value.size(); }
  double eps() const noexcept { return eps_; }

  Parameter gamma;
  Parameter beta;
  Tensor running_mean;
  Tensor running_var;

 private:
  double eps_ = 1e-5;
  double momentum_ = 0.1;
  std::optional<Tensor> cached_xhat_;
  std::vector<double> cached_inv_std_;
};

/// Multiplies channel c by mask[c] in {0, 1}. The mask is not trainable.
class ChannelSelect {
 public:
  ChannelSelect() = default;
  explicit ChannelSelect(std::size_t channels) : mask(std::vector<std::size_t>{channels}, 1.0) {}

  Tensor forward(const Tensor& x) const;
  Tensor forward_train(const Tensor& x);
  Tensor backward(const Tensor& dy);

  void collect(const std::string& prefix, StateRefs& refs);
  void keep_channels(std::span<const std::size_t> keep);

  Tensor mask;

 private:
  bool has_cache_ = false;
};

class ReLU {
 public:
  Tensor forward(const Tensor& x) const;
  Tensor forward_train(const Tensor& x);
  Tensor backward(const Tensor& dy);

 private:
  std::optional<Tensor> cached_input_;
};

/// 2x2 max pool, stride 2.
class MaxPool2 {
 public:
  Tensor forward(const Tensor& x) const;
  Tensor forward_train(const Tensor& x);
  Tensor backward(const Tensor& dy);

 private:
  std::vector<std::size_t> argmax_;
  std::vector<std::size_t> input_shape_;
};

/// [B, C, H, W] -> [B, C]: maximum over all spatial positions.
class GlobalMaxPool {
 public:
  Tensor forward(const Tensor& x) const;
  Tensor forward_train(const Tensor& x);
  Tensor backward(const Tensor& dy);

 private:
  std::vector<std::size_t> argmax_;
  std::vector<std::size_t> input_shape_;
};

/// [B, C, H, W] -> [B, C * W]: maximum over the height axis per column.
class HeightMax {
 public:
  Tensor forward(const Tensor& x) const;
  Tensor forward_train(const Tensor& x);
  Tensor backward(const Tensor& dy);

 private:
  std::vector<std::size_t> argmax_;
  std::vector<std::size_t> input_shape_;
};

/// Channel-wise inverted dropout: in training each (sample, channel) is
/// kept with probability keep_rate and rescaled by 1/keep_rate; identity at
/// inference.
class ChannelDrop {
 public:
  explicit ChannelDrop(double keep_rate = 0.9) : keep_rate_(keep_rate) {}

  Tensor forward(const Tensor& x) const { return x; }
  Tensor forward_train(const Tensor& x, Rng& rng);
  Tensor backward(const Tensor& dy);

  double keep_rate() const noexcept { return keep_rate_; }

 private:
  double keep_rate_;
  std::optional<std::vector<double>> scale_;  // per (b, c)
  std::vector<std::size_t> input_shape_;
};

/// y = x W^T + b on [B, in] inputs.
class Linear {
 public:
  Linear() = default;
  Linear(std::size_t in_features, std::size_t out_features);

  Tensor forward(const Tensor& x) const;
  Tensor forward_train(const Tensor& x);
  Tensor backward(const Tensor& dy);

  void init(Rng& rng);
  void collect(const std::string& prefix, StateRefs& refs);

  std::size_t in_features() const noexcept { return in_; }
  std::size_t out_features() const noexcept { return out_; }

  Parameter weight;  // [out, in]
  Parameter bias;    // [out]

 private:
  std::size_t in_ = 0, out_ = 0;
  std::optional<Tensor> cached_input_;
};

Tensor add(const Tensor& a, const Tensor& b);

}  // namespace gfd::nn

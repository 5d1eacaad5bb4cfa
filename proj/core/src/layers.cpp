#include "gfd/layers.hpp"

#include <algorithm>
#include <cmath>

#include "gfd/error.hpp"

namespace gfd::nn {
namespace {

void require_rank(const Tensor& x, std::size_t rank, const char* layer) {
  if (x.rank() != rank) {
    fail(ErrorKind::ShapeMismatch, std::string(layer) + ": expected rank " + std::to_string(rank) +
                                       " input, got " + shape_string(x.shape()));
  }
}

void require_cache(bool present, const char* layer) {
  if (!present) fail(ErrorKind::NoForwardCache, std::string(layer) + ": backward without training forward");
}

void require_same_shape(const Tensor& dy, const std::vector<std::size_t>& shape, const char* layer) {
  if (dy.shape() != shape) {
    fail(ErrorKind::ShapeMismatch, std::string(layer) + ": gradient shape " + shape_string(dy.shape()) +
                                       " does not match " + shape_string(shape));
  }
}

Tensor select_channels(const Tensor& t, std::span<const std::size_t> keep) {
  Tensor out({keep.size()});
  for (std::size_t i = 0; i < keep.size(); ++i) out[i] = t[keep[i]];
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_h,
               std::size_t kernel_w, std::size_t stride, std::size_t pad_h, std::size_t pad_w)
    : weight({out_channels, in_channels, kernel_h, kernel_w}),
      bias({out_channels}),
      in_(in_channels),
      out_(out_channels),
      kh_(kernel_h),
      kw_(kernel_w),
      stride_(stride),
      ph_(pad_h),
      pw_(pad_w) {}

void Conv2d::init(Rng& rng) {
  const double fan_in = static_cast<double>(in_ * kh_ * kw_);
  const double wb = std::sqrt(6.0 / fan_in);
  const double bb = 1.0 / std::sqrt(fan_in);
  for (double& w : weight.value.data()) w = rng.uniform(-wb, wb);
  for (double& b : bias.value.data()) b = rng.uniform(-bb, bb);
}

void Conv2d::collect(const std::string& prefix, StateRefs& refs) {
  refs.params.push_back({prefix + ".weight", &weight});
  refs.params.push_back({prefix + ".bias", &bias});
}

std::size_t Conv2d::out_size(std::size_t in, std::size_t k, std::size_t pad) const {
  if (in + 2 * pad < k) fail(ErrorKind::ShapeMismatch, "conv: input smaller than kernel");
  return (in + 2 * pad - k) / stride_ + 1;
}

void Conv2d::im2col(const double* x, std::size_t h, std::size_t w, std::size_t oh, std::size_t ow,
                    double* cols) const {
  const std::size_t p_count = oh * ow;
  for (std::size_t c = 0; c < in_; ++c) {
    const double* xc = x + c * h * w;
    for (std::size_t i = 0; i < kh_; ++i) {
      for (std::size_t j = 0; j < kw_; ++j) {
        double* row = cols + ((c * kh_ + i) * kw_ + j) * p_count;
        for (std::size_t oy = 0; oy < oh; ++oy) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * stride_ + i) - static_cast<std::ptrdiff_t>(ph_);
          double* out = row + oy * ow;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) {
            std::fill(out, out + ow, 0.0);
            continue;
          }
          const double* xrow = xc + static_cast<std::size_t>(iy) * w;
          for (std::size_t ox = 0; ox < ow; ++ox) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * stride_ + j) - static_cast<std::ptrdiff_t>(pw_);
            out[ox] = (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) ? 0.0 : xrow[ix];
          }
        }
      }
    }
  }
}

Tensor Conv2d::forward(const Tensor& x) const {
  require_rank(x, 4, "conv");
  if (x.dim(1) != in_) {
    fail(ErrorKind::ShapeMismatch, "conv: expected " + std::to_string(in_) + " input channels, got " +
                                       std::to_string(x.dim(1)));
  }
  const std::size_t batch = x.dim(0), h = x.dim(2), w = x.dim(3);
  const std::size_t oh = out_size(h, kh_, ph_), ow = out_size(w, kw_, pw_);
  const std::size_t p_count = oh * ow;
  const std::size_t k_count = in_ * kh_ * kw_;
  Tensor y({batch, out_, oh, ow});
  std::vector<double> cols(k_count * p_count);
  const double* wt = weight.value.ptr();
  for (std::size_t b = 0; b < batch; ++b) {
    im2col(x.ptr() + b * in_ * h * w, h, w, oh, ow, cols.data());
    double* yb = y.ptr() + b * out_ * p_count;
    for (std::size_t co = 0; co < out_; ++co) {
      double* yrow = yb + co * p_count;
      std::fill(yrow, yrow + p_count, bias.value[co]);
      const double* wrow = wt + co * k_count;
      for (std::size_t k = 0; k < k_count; ++k) {
        const double wk = wrow[k];
        const double* crow = cols.data() + k * p_count;
        for (std::size_t p = 0; p < p_count; ++p) yrow[p] += wk * crow[p];
      }
    }
  }
  return y;
}

Tensor Conv2d::forward_train(const Tensor& x) {
  Tensor y = forward(x);
  cached_input_ = x;
  return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
  require_cache(cached_input_.has_value(), "conv");
  const Tensor& x = *cached_input_;
  const std::size_t batch = x.dim(0), h = x.dim(2), w = x.dim(3);
  const std::size_t oh = out_size(h, kh_, ph_), ow = out_size(w, kw_, pw_);
  require_same_shape(dy, {batch, out_, oh, ow}, "conv");
  const std::size_t p_count = oh * ow;
  const std::size_t k_count = in_ * kh_ * kw_;

  Tensor dx(x.shape());
  std::vector<double> cols(k_count * p_count);
  std::vector<double> dcols(k_count * p_count);
  const double* wt = weight.value.ptr();
  double* dw = weight.grad.ptr();
  for (std::size_t b = 0; b < batch; ++b) {
    im2col(x.ptr() + b * in_ * h * w, h, w, oh, ow, cols.data());
    const double* dyb = dy.ptr() + b * out_ * p_count;
    std::fill(dcols.begin(), dcols.end(), 0.0);
    for (std::size_t co = 0; co < out_; ++co) {
      const double* drow = dyb + co * p_count;
      double db = 0.0;
      for (std::size_t p = 0; p < p_count; ++p) db += drow[p];
      bias.grad[co] += db;
      double* dwrow = dw + co * k_count;
      const double* wrow = wt + co * k_count;
      for (std::size_t k = 0; k < k_count; ++k) {
        const double* crow = cols.data() + k * p_count;
        double acc = 0.0;
        for (std::size_t p = 0; p < p_count; ++p) acc += drow[p] * crow[p];
        dwrow[k] += acc;
        const double wk = wrow[k];
        double* dcrow = dcols.data() + k * p_count;
        for (std::size_t p = 0; p < p_count; ++p) dcrow[p] += wk * drow[p];
      }
    }
    // col2im
    double* dxb = dx.ptr() + b * in_ * h * w;
    for (std::size_t c = 0; c < in_; ++c) {
      double* dxc = dxb + c * h * w;
      for (std::size_t i = 0; i < kh_; ++i) {
        for (std::size_t j = 0; j < kw_; ++j) {
          const double* row = dcols.data() + ((c * kh_ + i) * kw_ + j) * p_count;
          for (std::size_t oy = 0; oy < oh; ++oy) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * stride_ + i) - static_cast<std::ptrdiff_t>(ph_);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
            double* dxrow = dxc + static_cast<std::size_t>(iy) * w;
            for (std::size_t ox = 0; ox < ow; ++ox) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * stride_ + j) - static_cast<std::ptrdiff_t>(pw_);
              if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(w)) dxrow[ix] += row[oy * ow + ox];
            }
          }
        }
      }
    }
  }
  return dx;
}

void Conv2d::keep_output_channels(std::span<const std::size_t> keep) {
  const std::size_t per = in_ * kh_ * kw_;
  Parameter w({keep.size(), in_, kh_, kw_});
  Parameter b({keep.size()});
  for (std::size_t i = 0; i < keep.size(); ++i) {
    std::copy_n(weight.value.ptr() + keep[i] * per, per, w.value.ptr() + i * per);
    b.value[i] = bias.value[keep[i]];
  }
  weight = std::move(w);
  bias = std::move(b);
  out_ = keep.size();
  cached_input_.reset();
}

void Conv2d::keep_input_channels(std::span<const std::size_t> keep) {
  const std::size_t ksz = kh_ * kw_;
  Parameter w({out_, keep.size(), kh_, kw_});
  for (std::size_t co = 0; co < out_; ++co) {
    for (std::size_t i = 0; i < keep.size(); ++i) {
      std::copy_n(weight.value.ptr() + (co * in_ + keep[i]) * ksz, ksz,
                  w.value.ptr() + (co * keep.size() + i) * ksz);
    }
  }
  weight = std::move(w);
  in_ = keep.size();
  cached_input_.reset();
}

// ----------------------------------------------------------- BatchNorm2d

BatchNorm2d::BatchNorm2d(std::size_t channels, double eps, double momentum)
    : gamma({channels}),
      beta({channels}),
      running_mean({channels}, 0.0),
      running_var({channels}, 1.0),
      eps_(eps),
      momentum_(momentum) {
  if (!(eps > 0.0)) fail(ErrorKind::DomainError, "batch-norm epsilon must be > 0");
  gamma.value.fill(1.0);
}

void BatchNorm2d::collect(const std::string& prefix, StateRefs& refs) {
  refs.params.push_back({prefix + ".gamma", &gamma});
  refs.params.push_back({prefix + ".beta", &beta});
  refs.buffers.push_back({prefix + ".running_mean", &running_mean});
  refs.buffers.push_back({prefix + ".running_var", &running_var});
}

Tensor BatchNorm2d::forward(const Tensor& x) const {
  require_rank(x, 4, "batchnorm");
  const std::size_t batch = x.dim(0), ch = x.dim(1), plane = x.dim(2) * x.dim(3);
  if (ch != channels()) fail(ErrorKind::ShapeMismatch, "batchnorm: channel count mismatch");
  Tensor y(x.shape());
  for (std::size_t c = 0; c < ch; ++c) {
    const double inv = 1.0 / std::sqrt(running_var[c] + eps_);
    const double scale = gamma.value[c] * inv;
    const double shift = beta.value[c] - running_mean[c] * scale;
    for (std::size_t b = 0; b < batch; ++b) {
      const double* xp = x.ptr() + (b * ch + c) * plane;
      double* yp = y.ptr() + (b * ch + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) yp[p] = xp[p] * scale + shift;
    }
  }
  return y;
}

Tensor BatchNorm2d::forward_train(const Tensor& x) {
  require_rank(x, 4, "batchnorm");
  const std::size_t batch = x.dim(0), ch = x.dim(1), plane = x.dim(2) * x.dim(3);
  if (ch != channels()) fail(ErrorKind::ShapeMismatch, "batchnorm: channel count mismatch");
  const double m = static_cast<double>(batch * plane);
  Tensor xhat(x.shape());
  Tensor y(x.shape());
  cached_inv_std_.assign(ch, 0.0);
  for (std::size_t c = 0; c < ch; ++c) {
    double mean = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      const double* xp = x.ptr() + (b * ch + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) mean += xp[p];
    }
    mean /= m;
    double var = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      const double* xp = x.ptr() + (b * ch + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) var += (xp[p] - mean) * (xp[p] - mean);
    }
    var /= m;
    const double inv = 1.0 / std::sqrt(var + eps_);
    cached_inv_std_[c] = inv;
    for (std::size_t b = 0; b < batch; ++b) {
      const double* xp = x.ptr() + (b * ch + c) * plane;
      double* hp = xhat.ptr() + (b * ch + c) * plane;
      double* yp = y.ptr() + (b * ch + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) {
        hp[p] = (xp[p] - mean) * inv;
        yp[p] = gamma.value[c] * hp[p] + beta.value[c];
      }
    }
    const double unbiased = m > 1.0 ? var * m / (m - 1.0) : var;
    running_mean[c] = (1.0 - momentum_) * running_mean[c] + momentum_ * mean;
    running_var[c] = (1.0 - momentum_) * running_var[c] + momentum_ * unbiased;
  }
  cached_xhat_ = std::move(xhat);
  return y;
}

Tensor BatchNorm2d::backward(const Tensor& dy) {
  require_cache(cached_xhat_.has_value(), "batchnorm");
  const Tensor& xhat = *cached_xhat_;
  require_same_shape(dy, xhat.shape(), "batchnorm");
  const std::size_t batch = xhat.dim(0), ch = xhat.dim(1), plane = xhat.dim(2) * xhat.dim(3);
  const double m = static_cast<double>(batch * plane);
  Tensor dx(xhat.shape());
  for (std::size_t c = 0; c < ch; ++c) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      const double* dp = dy.ptr() + (b * ch + c) * plane;
      const double* hp = xhat.ptr() + (b * ch + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) {
        sum_dy += dp[p];
        sum_dy_xhat += dp[p] * hp[p];
      }
    }
    gamma.grad[c] += sum_dy_xhat;
    beta.grad[c] += sum_dy;
    const double k = gamma.value[c] * cached_inv_std_[c] / m;
    for (std::size_t b = 0; b < batch; ++b) {
      const double* dp = dy.ptr() + (b * ch + c) * plane;
      const double* hp = xhat.ptr() + (b * ch + c) * plane;
      double* dxp = dx.ptr() + (b * ch + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) dxp[p] = k * (m * dp[p] - sum_dy - hp[p] * sum_dy_xhat);
    }
  }
  return dx;
}

void BatchNorm2d::keep_channels(std::span<const std::size_t> keep) {
  Parameter g({keep.size()}), b({keep.size()});
  g.value = select_channels(gamma.value, keep);
  b.value = select_channels(beta.value, keep);
  gamma = std::move(g);
  beta = std::move(b);
  running_mean = select_channels(running_mean, keep);
  running_var = select_channels(running_var, keep);
  cached_xhat_.reset();
}

// --------------------------------------------------------- ChannelSelect

void ChannelSelect::collect(const std::string& prefix, StateRefs& refs) {
  refs.buffers.push_back({prefix + ".mask", &mask});
}

Tensor ChannelSelect::forward(const Tensor& x) const {
  require_rank(x, 4, "channel select");
  const std::size_t batch = x.dim(0), ch = x.dim(1), plane = x.dim(2) * x.dim(3);
  if (ch != mask.size()) fail(ErrorKind::ShapeMismatch, "channel select: channel count mismatch");
  Tensor y(x.shape());
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < ch; ++c) {
      const double* xp = x.ptr() + (b * ch + c) * plane;
      double* yp = y.ptr() + (b * ch + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) yp[p] = xp[p] * mask[c];
    }
  }
  return y;
}

Tensor ChannelSelect::forward_train(const Tensor& x) {
  has_cache_ = true;
  return forward(x);
}

Tensor ChannelSelect::backward(const Tensor& dy) {
  require_cache(has_cache_, "channel select");
  return forward(dy);
}

void ChannelSelect::keep_channels(std::span<const std::size_t> keep) {
  mask = select_channels(mask, keep);
  has_cache_ = false;
}

// ------------------------------------------------------------------ ReLU

Tensor ReLU::forward(const Tensor& x) const {
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  return y;
}

Tensor ReLU::forward_train(const Tensor& x) {
  cached_input_ = x;
  return forward(x);
}

Tensor ReLU::backward(const Tensor& dy) {
  require_cache(cached_input_.has_value(), "relu");
  require_same_shape(dy, cached_input_->shape(), "relu");
  Tensor dx(dy.shape());
  const Tensor& x = *cached_input_;
  for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
  return dx;
}

// -------------------------------------------------------------- MaxPool2

namespace {

Tensor maxpool2(const Tensor& x, std::vector<std::size_t>* argmax) {
  require_rank(x, 4, "maxpool");
  const std::size_t batch = x.dim(0), ch = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::size_t oh = h / 2, ow = w / 2;
  if (oh == 0 || ow == 0) fail(ErrorKind::ShapeMismatch, "maxpool: input smaller than window");
  Tensor y({batch, ch, oh, ow});
  if (argmax) argmax->assign(y.size(), 0);
  for (std::size_t bc = 0; bc < batch * ch; ++bc) {
    const double* xp = x.ptr() + bc * h * w;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        std::size_t best = (2 * oy) * w + 2 * ox;
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = (2 * oy + dy) * w + 2 * ox + dx;
            if (xp[idx] > xp[best]) best = idx;
          }
        }
        const std::size_t out = bc * oh * ow + oy * ow + ox;
        y[out] = xp[best];
        if (argmax) (*argmax)[out] = bc * h * w + best;
      }
    }
  }
  return y;
}

Tensor scatter_back(const Tensor& dy, const std::vector<std::size_t>& argmax,
                    const std::vector<std::size_t>& input_shape) {
  Tensor dx(input_shape);
  for (std::size_t i = 0; i < dy.size(); ++i) dx[argmax[i]] += dy[i];
  return dx;
}

}  // namespace

Tensor MaxPool2::forward(const Tensor& x) const { return maxpool2(x, nullptr); }

Tensor MaxPool2::forward_train(const Tensor& x) {
  input_shape_ = x.shape();
  return maxpool2(x, &argmax_);
}

Tensor MaxPool2::backward(const Tensor& dy) {
  require_cache(!input_shape_.empty(), "maxpool");
  if (dy.size() != argmax_.size()) fail(ErrorKind::ShapeMismatch, "maxpool: gradient shape mismatch");
  return scatter_back(dy, argmax_, input_shape_);
}

// --------------------------------------------------------- GlobalMaxPool

namespace {

Tensor global_max(const Tensor& x, std::vector<std::size_t>* argmax) {
  require_rank(x, 4, "global max pool");
  const std::size_t batch = x.dim(0), ch = x.dim(1), plane = x.dim(2) * x.dim(3);
  Tensor y({batch, ch});
  if (argmax) argmax->assign(y.size(), 0);
  for (std::size_t bc = 0; bc < batch * ch; ++bc) {
    const double* xp = x.ptr() + bc * plane;
    std::size_t best = 0;
    for (std::size_t p = 1; p < plane; ++p) {
      if (xp[p] > xp[best]) best = p;
    }
    y[bc] = xp[best];
    if (argmax) (*argmax)[bc] = bc * plane + best;
  }
  return y;
}

Tensor height_max(const Tensor& x, std::vector<std::size_t>* argmax) {
  require_rank(x, 4, "height max");
  const std::size_t batch = x.dim(0), ch = x.dim(1), h = x.dim(2), w = x.dim(3);
  Tensor y({batch, ch * w});
  if (argmax) argmax->assign(y.size(), 0);
  for (std::size_t bc = 0; bc < batch * ch; ++bc) {
    const double* xp = x.ptr() + bc * h * w;
    for (std::size_t col = 0; col < w; ++col) {
      std::size_t best = col;
      for (std::size_t row = 1; row < h; ++row) {
        if (xp[row * w + col] > xp[best]) best = row * w + col;
      }
      y[bc * w + col] = xp[best];
      if (argmax) (*argmax)[bc * w + col] = bc * h * w + best;
    }
  }
  return y;
}

}  // namespace

Tensor GlobalMaxPool::forward(const Tensor& x) const { return global_max(x, nullptr); }

Tensor GlobalMaxPool::forward_train(const Tensor& x) {
  input_shape_ = x.shape();
  return global_max(x, &argmax_);
}

Tensor GlobalMaxPool::backward(const Tensor& dy) {
  require_cache(!input_shape_.empty(), "global max pool");
  if (dy.size() != argmax_.size()) fail(ErrorKind::ShapeMismatch, "global max pool: gradient shape mismatch");
  return scatter_back(dy, argmax_, input_shape_);
}

Tensor HeightMax::forward(const Tensor& x) const { return height_max(x, nullptr); }

Tensor HeightMax::forward_train(const Tensor& x) {
  input_shape_ = x.shape();
  return height_max(x, &argmax_);
}

Tensor HeightMax::backward(const Tensor& dy) {
  require_cache(!input_shape_.empty(), "height max");
  if (dy.size() != argmax_.size()) fail(ErrorKind::ShapeMismatch, "height max: gradient shape mismatch");
  return scatter_back(dy, argmax_, input_shape_);
}

// ----------------------------------------------------------- ChannelDrop

Tensor ChannelDrop::forward_train(const Tensor& x, Rng& rng) {
  require_rank(x, 4, "channel drop");
  const std::size_t bc_count = x.dim(0) * x.dim(1), plane = x.dim(2) * x.dim(3);
  std::vector<double> scale(bc_count);
  for (double& s : scale) s = rng.bernoulli(keep_rate_) ? 1.0 / keep_rate_ : 0.0;
  Tensor y(x.shape());
  for (std::size_t bc = 0; bc < bc_count; ++bc) {
    for (std::size_t p = 0; p < plane; ++p) y[bc * plane + p] = x[bc * plane + p] * scale[bc];
  }
  scale_ = std::move(scale);
  input_shape_ = x.shape();
  return y;
}

Tensor ChannelDrop::backward(const Tensor& dy) {
  require_cache(scale_.has_value(), "channel drop");
  require_same_shape(dy, input_shape_, "channel drop");
  const std::size_t plane = dy.dim(2) * dy.dim(3);
  Tensor dx(dy.shape());
  for (std::size_t bc = 0; bc < scale_->size(); ++bc) {
    for (std::size_t p = 0; p < plane; ++p) dx[bc * plane + p] = dy[bc * plane + p] * (*scale_)[bc];
  }
  return dx;
}

// ---------------------------------------------------------------- Linear

Linear::Linear(std::size_t in_features, std::size_t out_features)
    : weight({out_features, in_features}), bias({out_features}), in_(in_features), out_(out_features) {}

void Linear::init(Rng& rng) {
  const double fan_in = static_cast<double>(in_);
  const double wb = std::sqrt(6.0 / fan_in);
  const double bb = 1.0 / std::sqrt(fan_in);
  for (double& w : weight.value.data()) w = rng.uniform(-wb, wb);
  for (double& b : bias.value.data()) b = rng.uniform(-bb, bb);
}

void Linear::collect(const std::string& prefix, StateRefs& refs) {
  refs.params.push_back({prefix + ".weight", &weight});
  refs.params.push_back({prefix + ".bias", &bias});
}

Tensor Linear::forward(const Tensor& x) const {
  require_rank(x, 2, "linear");
  if (x.dim(1) != in_) {
    fail(ErrorKind::ShapeMismatch, "linear: expected " + std::to_string(in_) + " features, got " +
                                       std::to_string(x.dim(1)));
  }
  const std::size_t batch = x.dim(0);
  Tensor y({batch, out_});
  for (std::size_t b = 0; b < batch; ++b) {
    const double* xp = x.ptr() + b * in_;
    for (std::size_t o = 0; o < out_; ++o) {
      const double* wp = weight.value.ptr() + o * in_;
      double acc = bias.value[o];
      for (std::size_t i = 0; i < in_; ++i) acc += wp[i] * xp[i];
      y[b * out_ + o] = acc;
    }
  }
  return y;
}

Tensor Linear::forward_train(const Tensor& x) {
  Tensor y = forward(x);
  cached_input_ = x;
  return y;
}

Tensor Linear::backward(const Tensor& dy) {
  require_cache(cached_input_.has_value(), "linear");
  const Tensor& x = *cached_input_;
  const std::size_t batch = x.dim(0);
  require_same_shape(dy, {batch, out_}, "linear");
  Tensor dx(x.shape());
  for (std::size_t b = 0; b < batch; ++b) {
    const double* xp = x.ptr() + b * in_;
    double* dxp = dx.ptr() + b * in_;
    for (std::size_t o = 0; o < out_; ++o) {
      const double g = dy[b * out_ + o];
      bias.grad[o] += g;
      double* dwp = weight.grad.ptr() + o * in_;
      const double* wp = weight.value.ptr() + o * in_;
      for (std::size_t i = 0; i < in_; ++i) {
        dwp[i] += g * xp[i];
        dxp[i] += g * wp[i];
      }
    }
  }
  return dx;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    fail(ErrorKind::ShapeMismatch, "add: " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
  Tensor y(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] + b[i];
  return y;
}

}  // namespace gfd::nn

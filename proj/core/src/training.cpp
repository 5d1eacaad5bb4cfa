#include "gfd/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gfd/augmentation.hpp"
#include "gfd/csv.hpp"
#include "gfd/error.hpp"
#include "gfd/rng.hpp"

namespace gfd {
namespace {

void check_batch(const Tensor& logits, std::span<const int> labels, std::size_t width) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size() || logits.dim(1) != width || labels.empty()) {
    fail(ErrorKind::ShapeMismatch, "logits " + shape_string(logits.shape()) + " do not match " +
                                       std::to_string(labels.size()) + " labels");
  }
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LossResult bce_loss(const Tensor& logits, std::span<const int> labels) {
  check_batch(logits, labels, 1);
  const double n = static_cast<double>(labels.size());
  LossResult r;
  r.grad = Tensor(logits.shape());
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) fail(ErrorKind::LabelDomain, "binary labels must be 0 or 1");
    const double z = logits[i];
    if (!std::isfinite(z)) fail(ErrorKind::DomainError, "non-finite logit");
    const double y = labels[i];
    total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    r.grad[i] = (sigmoid(z) - y) / n;
  }
  r.loss = total / n;
  return r;
}

LossResult softmax_cross_entropy(const Tensor& logits, std::span<const int> labels) {
  if (logits.rank() != 2) fail(ErrorKind::ShapeMismatch, "logits must be [B, K]");
  const std::size_t k = logits.dim(1);
  check_batch(logits, labels, k);
  const double n = static_cast<double>(labels.size());
  LossResult r;
  r.grad = Tensor(logits.shape());
  double total = 0.0;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    if (labels[b] < 0 || static_cast<std::size_t>(labels[b]) >= k) {
      fail(ErrorKind::LabelDomain, "class label outside [0, K)");
    }
    const double* z = logits.ptr() + b * k;
    const double zmax = *std::max_element(z, z + k);
    double denom = 0.0;
    for (std::size_t j = 0; j < k; ++j) denom += std::exp(z[j] - zmax);
    const double log_denom = std::log(denom) + zmax;
    total += log_denom - z[labels[b]];
    for (std::size_t j = 0; j < k; ++j) {
      const double p = std::exp(z[j] - log_denom);
      r.grad[b * k + j] = (p - (static_cast<int>(j) == labels[b] ? 1.0 : 0.0)) / n;
    }
  }
  r.loss = total / n;
  return r;
}

LossResult compute_loss(const Tensor& logits, std::span<const int> labels, LossMode mode) {
  return mode == LossMode::BinarySigmoid ? bce_loss(logits, labels) : softmax_cross_entropy(logits, labels);
}

AdamState make_adam_state(std::span<Parameter* const> params) {
  AdamState s;
  for (auto* p : params) {
    s.m.emplace_back(p->value.shape());
    s.v.emplace_back(p->value.shape());
  }
  return s;
}

void adam_step(std::span<Parameter* const> params, AdamState& state, double lr, const AdamConfig& config) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    fail(ErrorKind::ShapeMismatch, "optimizer state does not match parameter list");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.m[i].shape() != params[i]->value.shape() || params[i]->grad.shape() != params[i]->value.shape()) {
      fail(ErrorKind::ShapeMismatch, "optimizer state shape mismatch at parameter " + std::to_string(i));
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto value = params[i]->value.data();
    auto grad = params[i]->grad.data();
    auto m = state.m[i].data();
    auto v = state.v[i].data();
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double g = grad[k];
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g;
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g * g;
      const double mhat = m[k] / c1;
      const double vhat = v[k] / c2;
      value[k] -= lr * mhat / (std::sqrt(vhat) + config.eps);
    }
  }
}

double lr_at_epoch(const TrainConfig& config, std::size_t epoch) {
  const std::size_t every = std::max<std::size_t>(1, config.decay_every);
  return config.initial_lr * std::pow(config.lr_decay, static_cast<double>(epoch / every));
}

int target_of(ClassLabel label, LossMode mode) {
  return mode == LossMode::BinarySigmoid ? binary_target(label) : static_cast<int>(label);
}

std::vector<int> targets_of(std::span<const PairedSample> samples, LossMode mode) {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(target_of(s.label, mode));
  return out;
}

Tensor series_batch_of(std::span<const PairedSample> samples) {
  std::vector<const std::vector<double>*> ptrs;
  for (const auto& s : samples) ptrs.push_back(&s.window.values);
  return series_batch(ptrs);
}

Tensor image_batch_of(std::span<const PairedSample> samples) {
  std::vector<const GrayImage*> ptrs;
  for (const auto& s : samples) ptrs.push_back(&s.image);
  return image_batch(ptrs);
}

namespace {

int decide(const Tensor& logits, std::size_t row, LossMode mode) {
  if (mode == LossMode::BinarySigmoid) return logits[row] > 0.0 ? 1 : 0;
  const std::size_t k = logits.dim(1);
  const double* z = logits.ptr() + row * k;
  return static_cast<int>(std::max_element(z, z + k) - z);
}

void check_mode(const FusionModel& model, LossMode mode) {
  const std::size_t want = mode == LossMode::BinarySigmoid ? 1 : 4;
  if (model.config().num_outputs != want) {
    fail(ErrorKind::ShapeMismatch, "model has " + std::to_string(model.config().num_outputs) +
                                       " outputs but loss mode " + std::string(to_string(mode)) +
                                       " needs " + std::to_string(want));
  }
}

}  // namespace

std::vector<int> predict(const FusionModel& model, std::span<const PairedSample> samples, LossMode mode) {
  check_mode(model, mode);
  constexpr std::size_t kChunk = 64;
  std::vector<int> out;
  out.reserve(samples.size());
  for (std::size_t start = 0; start < samples.size(); start += kChunk) {
    const auto chunk = samples.subspan(start, std::min(kChunk, samples.size() - start));
    const Tensor logits = model.forward(series_batch_of(chunk), image_batch_of(chunk));
    for (std::size_t i = 0; i < chunk.size(); ++i) out.push_back(decide(logits, i, mode));
  }
  return out;
}

History train(FusionModel& model, std::span<const PairedSample> train_set, const TrainConfig& config) {
  if (train_set.empty()) fail(ErrorKind::EmptyDataset, "training set is empty");
  if (config.batch_size < 1) fail(ErrorKind::DomainError, "batch size must be >= 1");
  if (!(config.initial_lr > 0.0)) fail(ErrorKind::DomainError, "initial learning rate must be > 0");
  check_mode(model, config.loss_mode);

  const auto params = model.parameters();
  AdamState adam = make_adam_state(params);
  const std::size_t n = train_set.size();
  History history;

  std::vector<std::size_t> order(n);
  std::vector<std::vector<double>> series(config.batch_size);
  std::vector<GrayImage> images(config.batch_size);
  std::vector<int> labels;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = lr_at_epoch(config, epoch);
    const std::uint64_t epoch_seed = mix_seed(config.seed, 1000 + epoch);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle(epoch_seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
      const std::size_t count = std::min(config.batch_size, n - start);
      labels.clear();
      std::vector<const std::vector<double>*> sp;
      std::vector<const GrayImage*> ip;
      for (std::size_t j = 0; j < count; ++j) {
        const std::size_t idx = order[start + j];
        const PairedSample& s = train_set[idx];
        Rng rng(mix_seed(epoch_seed, idx));
        const std::size_t pick = static_cast<std::size_t>(rng.below(config.augment_epsilons.size() + 1));
        const double eps = pick == 0 ? 0.0 : config.augment_epsilons[pick - 1];
        const std::uint64_t noise_seed = rng.next_u64();
        const bool flip = rng.bernoulli(config.flip_probability);
        if (eps > 0.0 && rms(s.window.values) > 0.0) {
          series[j] = add_series_noise(s.window.values, eps, noise_seed);
          images[j] = series_to_image(series[j], s.image.size());
        } else {
          series[j] = s.window.values;
          images[j] = s.image;
        }
        if (flip) images[j] = flip_horizontal(images[j]);
        sp.push_back(&series[j]);
        ip.push_back(&images[j]);
        labels.push_back(target_of(s.label, config.loss_mode));
      }
      const Tensor logits = model.forward_train(series_batch(sp), image_batch(ip),
                                                mix_seed(epoch_seed, 1'000'000 + batch_index));
      const LossResult loss = compute_loss(logits, labels, config.loss_mode);
      model.zero_grad();
      model.backward(loss.grad);
      adam_step(params, adam, lr);

      loss_sum += loss.loss * static_cast<double>(count);
      for (std::size_t j = 0; j < count; ++j) {
        if (decide(logits, j, config.loss_mode) == labels[j]) ++correct;
      }
    }
    history.push_back({epoch + 1, lr, loss_sum / static_cast<double>(n),
                       100.0 * static_cast<double>(correct) / static_cast<double>(n)});
  }
  return history;
}

std::string encode_history_csv(const History& history) {
  CsvWriter csv({"epoch", "lr", "loss", "train_acc"});
  for (const auto& e : history) csv.row(e.epoch, e.lr, e.loss, e.train_accuracy);
  return csv.str();
}

FusionModel make_model(std::size_t series_length, std::size_t image_size, const TrainConfig& config,
                       Variant variant) {
  ModelConfig mc = scaled_model_config(config.channel_scale, series_length, image_size, config.loss_mode);
  mc.variant = variant;
  return FusionModel(mc, mix_seed(config.seed, 7));
}

}  // namespace gfd

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gfd/dataset.hpp"
#include "gfd/fusion_model.hpp"
#include "gfd/tensor.hpp"

namespace gfd {

struct LossResult {
  double loss = 0.0;
  Tensor grad;  // dL/dlogits, already divided by the batch size
};

double sigmoid(double z);

/// Mean binary cross-entropy on logits [B, 1], evaluated as
/// max(z, 0) - z*y + log(1 + exp(-|z|)). Labels must be 0 or 1.
LossResult bce_loss(const Tensor& logits, std::span<const int> labels);

/// Mean softmax cross-entropy on logits [B, K], labels in [0, K).
LossResult softmax_cross_entropy(const Tensor& logits, std::span<const int> labels);

LossResult compute_loss(const Tensor& logits, std::span<const int> labels, LossMode mode);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::size_t step = 0;
};

AdamState make_adam_state(std::span<Parameter* const> params);

/// Bias-corrected Adam update of every parameter from its accumulated grad.
void adam_step(std::span<Parameter* const> params, AdamState& state, double lr,
               const AdamConfig& config = {});

struct TrainConfig {
  std::size_t batch_size = 32;
  double initial_lr = 1e-4;
  double lr_decay = 0.8;
  std::size_t decay_every = 3;
  std::size_t epochs = 15;
  std::uint64_t seed = 0;
  LossMode loss_mode = LossMode::BinarySigmoid;
  double channel_scale = 0.25;
  // Per sample and epoch, one of {0} U augment_epsilons is drawn uniformly
  // as the series noise fraction; the image is rebuilt from the noisy series.
  std::vector<double> augment_epsilons{0.05, 0.1, 0.2, 0.5};
  double flip_probability = 0.5;
};

/// initial_lr * lr_decay^floor(epoch / decay_every); epoch counts from 0.
double lr_at_epoch(const TrainConfig& config, std::size_t epoch);

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double lr = 0.0;
  double loss = 0.0;
  double train_accuracy = 0.0;  // percent
};

using History = std::vector<EpochStats>;

/// Mini-batch Adam training with seeded shuffling and on-the-fly
/// augmentation (series noise, horizontal image flip).
History train(FusionModel& model, std::span<const PairedSample> train_set, const TrainConfig& config);

/// CSV: epoch,lr,loss,train_acc.
std::string encode_history_csv(const History& history);

int target_of(ClassLabel label, LossMode mode);
std::vector<int> targets_of(std::span<const PairedSample> samples, LossMode mode);

/// Class predictions in inference mode (binary: logit > 0).
std::vector<int> predict(const FusionModel& model, std::span<const PairedSample> samples, LossMode mode);

/// Builds model-ready tensors from paired samples.
Tensor series_batch_of(std::span<const PairedSample> samples);
Tensor image_batch_of(std::span<const PairedSample> samples);

/// Fresh model sized for a dataset and training configuration.
FusionModel make_model(std::size_t series_length, std::size_t image_size, const TrainConfig& config,
                       Variant variant = Variant::Whole);

}  // namespace gfd

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gfd/layers.hpp"
#include "gfd/series_transform.hpp"
#include "gfd/tensor.hpp"

namespace gfd {

enum class LossMode { BinarySigmoid, MulticlassSoftmax };

/// Ablation variants. Removed parts feed zeros of the same width into the
/// fusion layer so its shape never changes.
enum class Variant { Whole, NoSeriesBranch, NoGlobalHead, NoTransformerHead, TrunkOnly };

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view name);
std::string_view to_string(LossMode m);
std::optional<LossMode> parse_loss_mode(std::string_view name);

struct ModelConfig {
  std::size_t series_length = 64;
  std::size_t image_size = 64;
  std::size_t series_channels = 8;                   // C_s
  std::size_t stem_channels = 8;
  std::array<std::size_t, 3> stage_channels{16, 32, 64};  // last entry is C_i
  std::array<std::size_t, 3> stage_mid_channels{16, 32, 64};
  std::size_t num_outputs = 1;
  double keep_rate = 0.9;
  Variant variant = Variant::Whole;

  std::size_t image_channels() const noexcept { return stage_channels[2]; }
  std::size_t trunk_side() const noexcept { return image_size / 32; }
  std::size_t image_feature_width() const noexcept { return image_channels() * (1 + trunk_side()); }
  std::size_t fusion_width() const noexcept { return series_channels + image_feature_width(); }

  void validate() const;
};

/// Channel widths are the full-size ones (series 64, stem 64, stages
/// 128/256/512) times `channel_scale`, each at least 1.
ModelConfig scaled_model_config(double channel_scale, std::size_t series_length,
                                std::size_t image_size, LossMode mode);

struct BranchFeatures {
  std::vector<double> series;  // C_s
  std::vector<double> image;   // C_i global, then C_i * N/32 transformer
};

/// Random channel drop followed by a max over the height axis:
/// [B, C, W, W] -> [B, C * W]. `rng == nullptr` selects inference mode
/// (drop is the identity).
Tensor feature_transformer(const Tensor& trunk_output, double keep_rate, Rng* rng);

/// A batch-norm together with the channel selector that follows it.
struct BnUnit {
  std::string name;
  nn::BatchNorm2d* bn;
  nn::ChannelSelect* select;
  bool removable;     // channels may be physically deleted
  std::size_t block;  // residual block index for removable units
};

/// Dual-input classifier: a 1-D series branch and a residual image trunk
/// whose output feeds a global-pool head and a feature-transformer head.
/// The three feature sets are concatenated and mapped to logits.
class FusionModel {
 public:
  explicit FusionModel(const ModelConfig& config, std::uint64_t init_seed = 0);

  const ModelConfig& config() const noexcept { return config_; }

  /// Inference logits [B, K]. series: [B, 1, 1, L]; images: [B, 1, N, N].
  Tensor forward(const Tensor& series, const Tensor& images) const;

  /// Training pass: batch statistics, sampled channel drop.
  Tensor forward_train(const Tensor& series, const Tensor& images, std::uint64_t drop_seed);

  /// Accumulates gradients of every trainable parameter.
  void backward(const Tensor& dlogits);

  /// Pre-fusion features of one sample (batch of one), inference mode.
  BranchFeatures extract_branch_features(const Tensor& series, const Tensor& images) const;

  /// Trunk output [B, C_i, N/32, N/32] in inference mode.
  Tensor trunk_features(const Tensor& images) const;

  StateRefs state();
  std::vector<Parameter*> parameters();
  void zero_grad();
  std::size_t parameter_count() const;

  std::vector<BnUnit> bn_units();

  /// Physically removes mid channels of residual block `block`.
  void keep_mid_channels(std::size_t block, std::span<const std::size_t> keep);

  /// Zero-initializes the fusion layer (useful for tests).
  void zero_fusion_layer();

 private:
  struct SeriesBranch {
    nn::Conv2d conv_a, conv_b, mlp_1, mlp_2;
    nn::ReLU relu_a, relu_b, relu_mlp;
    nn::GlobalMaxPool pool;
  };

  struct ResidualBlock {
    nn::BatchNorm2d bn1;
    nn::ChannelSelect select1;
    nn::ReLU relu1;
    nn::Conv2d conv1;
    nn::BatchNorm2d bn2;
    nn::ChannelSelect select2;
    nn::ReLU relu2;
    nn::Conv2d conv2;
    nn::Conv2d shortcut;
  };

  struct Trunk {
    nn::Conv2d stem;
    nn::MaxPool2 pool;
    std::array<ResidualBlock, 3> blocks;
    nn::BatchNorm2d bn_out;
    nn::ChannelSelect select_out;
    nn::ReLU relu_out;
  };

  void check_inputs(const Tensor& series, const Tensor& images) const;
  bool uses_series() const noexcept;
  bool uses_global() const noexcept;
  bool uses_transformer() const noexcept;

  Tensor series_forward(const Tensor& x) const;
  Tensor series_forward_train(const Tensor& x);
  void series_backward(const Tensor& dy);

  static Tensor block_forward(const ResidualBlock& b, const Tensor& x);
  static Tensor block_forward_train(ResidualBlock& b, const Tensor& x);
  static Tensor block_backward(ResidualBlock& b, const Tensor& dy);

  Tensor trunk_forward_train(const Tensor& x);
  void trunk_backward(const Tensor& dy);

  Tensor fuse(std::size_t batch, const Tensor& series_feat, const Tensor& global, const Tensor& transformer) const;

  ModelConfig config_;
  SeriesBranch series_;
  Trunk trunk_;
  nn::GlobalMaxPool global_head_;
  nn::ChannelDrop drop_;
  nn::HeightMax height_max_;
  nn::Linear fusion_;
  bool has_cache_ = false;
};

/// [B, 1, 1, L] series tensor and [B, 1, N, N] image tensor; pixels map to
/// [-1, 1].
Tensor series_batch(std::span<const std::vector<double>* const> series);
Tensor image_batch(std::span<const GrayImage* const> images);

}  // namespace gfd

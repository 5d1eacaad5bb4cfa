#include "gfd/fusion_model.hpp"

#include <algorithm>
#include <cmath>

#include "gfd/augmentation.hpp"
#include "gfd/error.hpp"
#include "gfd/rng.hpp"

namespace gfd {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Whole: return "whole";
    case Variant::NoSeriesBranch: return "no_series_branch";
    case Variant::NoGlobalHead: return "no_global_head";
    case Variant::NoTransformerHead: return "no_transformer_head";
    case Variant::TrunkOnly: return "trunk_only";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (auto v : {Variant::Whole, Variant::NoSeriesBranch, Variant::NoGlobalHead,
                 Variant::NoTransformerHead, Variant::TrunkOnly}) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

std::string_view to_string(LossMode m) {
  return m == LossMode::BinarySigmoid ? "binary_sigmoid" : "multiclass_softmax";
}

std::optional<LossMode> parse_loss_mode(std::string_view name) {
  if (name == "binary_sigmoid") return LossMode::BinarySigmoid;
  if (name == "multiclass_softmax") return LossMode::MulticlassSoftmax;
  return std::nullopt;
}

void ModelConfig::validate() const {
  if (image_size == 0 || image_size % 32 != 0) {
    fail(ErrorKind::ShapeMismatch, "image size must be a positive multiple of 32");
  }
  if (series_length < 1 || series_channels < 1 || stem_channels < 1 || num_outputs < 1) {
    fail(ErrorKind::ShapeMismatch, "model widths must be >= 1");
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (stage_channels[i] < 1 || stage_mid_channels[i] < 1) {
      fail(ErrorKind::ShapeMismatch, "stage widths must be >= 1");
    }
  }
  if (!(keep_rate > 0.0 && keep_rate <= 1.0)) fail(ErrorKind::DomainError, "keep rate must lie in (0, 1]");
}

ModelConfig scaled_model_config(double channel_scale, std::size_t series_length,
                                std::size_t image_size, LossMode mode) {
  if (!(channel_scale > 0.0)) fail(ErrorKind::DomainError, "channel scale must be > 0");
  auto width = [&](double full) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(full * channel_scale)));
  };
  ModelConfig c;
  c.series_length = series_length;
  c.image_size = image_size;
  c.series_channels = width(64);
  c.stem_channels = width(64);
  c.stage_channels = {width(128), width(256), width(512)};
  c.stage_mid_channels = c.stage_channels;
  c.num_outputs = mode == LossMode::BinarySigmoid ? 1 : 4;
  c.validate();
  return c;
}

Tensor feature_transformer(const Tensor& trunk_output, double keep_rate, Rng* rng) {
  nn::ChannelDrop drop(keep_rate);
  nn::HeightMax reduce;
  if (rng == nullptr) return reduce.forward(drop.forward(trunk_output));
  return reduce.forward(drop.forward_train(trunk_output, *rng));
}

FusionModel::FusionModel(const ModelConfig& config, std::uint64_t init_seed)
    : config_(config), drop_(config.keep_rate) {
  config_.validate();
  const std::size_t cs = config_.series_channels;
  series_.conv_a = nn::Conv2d(1, cs, 1, 7, 1, 0, 3);
  series_.conv_b = nn::Conv2d(cs, cs, 1, 3, 1, 0, 1);
  series_.mlp_1 = nn::Conv2d(cs, cs, 1, 1, 1, 0, 0);
  series_.mlp_2 = nn::Conv2d(cs, cs, 1, 1, 1, 0, 0);

  trunk_.stem = nn::Conv2d(1, config_.stem_channels, 3, 3, 2, 1, 1);
  std::size_t in = config_.stem_channels;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t mid = config_.stage_mid_channels[i];
    const std::size_t out = config_.stage_channels[i];
    auto& b = trunk_.blocks[i];
    b.bn1 = nn::BatchNorm2d(in);
    b.select1 = nn::ChannelSelect(in);
    b.conv1 = nn::Conv2d(in, mid, 3, 3, 2, 1, 1);
    b.bn2 = nn::BatchNorm2d(mid);
    b.select2 = nn::ChannelSelect(mid);
    b.conv2 = nn::Conv2d(mid, out, 3, 3, 1, 1, 1);
    b.shortcut = nn::Conv2d(in, out, 1, 1, 2, 0, 0);
    in = out;
  }
  trunk_.bn_out = nn::BatchNorm2d(in);
  trunk_.select_out = nn::ChannelSelect(in);
  fusion_ = nn::Linear(config_.fusion_width(), config_.num_outputs);

  Rng rng(init_seed);
  series_.conv_a.init(rng);
  series_.conv_b.init(rng);
  series_.mlp_1.init(rng);
  series_.mlp_2.init(rng);
  trunk_.stem.init(rng);
  for (auto& b : trunk_.blocks) {
    b.conv1.init(rng);
    b.conv2.init(rng);
    b.shortcut.init(rng);
  }
  fusion_.init(rng);
}

bool FusionModel::uses_series() const noexcept {
  return config_.variant != Variant::NoSeriesBranch && config_.variant != Variant::TrunkOnly;
}
bool FusionModel::uses_global() const noexcept { return config_.variant != Variant::NoGlobalHead; }
bool FusionModel::uses_transformer() const noexcept {
  return config_.variant != Variant::NoTransformerHead && config_.variant != Variant::TrunkOnly;
}

void FusionModel::check_inputs(const Tensor& series, const Tensor& images) const {
  if (series.rank() != 4 || series.dim(1) != 1 || series.dim(2) != 1 ||
      series.dim(3) != config_.series_length) {
    fail(ErrorKind::ShapeMismatch, "series batch must be [B, 1, 1, " + std::to_string(config_.series_length) +
                                       "], got " + shape_string(series.shape()));
  }
  const std::size_t n = config_.image_size;
  if (images.rank() != 4 || images.dim(1) != 1 || images.dim(2) != n || images.dim(3) != n) {
    fail(ErrorKind::ShapeMismatch, "image batch must be [B, 1, " + std::to_string(n) + ", " +
                                       std::to_string(n) + "], got " + shape_string(images.shape()));
  }
  if (series.dim(0) != images.dim(0) || series.dim(0) == 0) {
    fail(ErrorKind::ShapeMismatch, "series and image batch sizes differ");
  }
}

// ------------------------------------------------------------ series path

Tensor FusionModel::series_forward(const Tensor& x) const {
  auto& s = series_;
  Tensor h = s.relu_a.forward(s.conv_a.forward(x));
  h = s.relu_b.forward(s.conv_b.forward(h));
  h = s.relu_mlp.forward(s.mlp_1.forward(h));
  return s.pool.forward(s.mlp_2.forward(h));
}

Tensor FusionModel::series_forward_train(const Tensor& x) {
  auto& s = series_;
  Tensor h = s.relu_a.forward_train(s.conv_a.forward_train(x));
  h = s.relu_b.forward_train(s.conv_b.forward_train(h));
  h = s.relu_mlp.forward_train(s.mlp_1.forward_train(h));
  return s.pool.forward_train(s.mlp_2.forward_train(h));
}

void FusionModel::series_backward(const Tensor& dy) {
  auto& s = series_;
  Tensor g = s.mlp_2.backward(s.pool.backward(dy));
  g = s.mlp_1.backward(s.relu_mlp.backward(g));
  g = s.conv_b.backward(s.relu_b.backward(g));
  s.conv_a.backward(s.relu_a.backward(g));
}

// ------------------------------------------------------------- trunk path

Tensor FusionModel::block_forward(const ResidualBlock& b, const Tensor& x) {
  Tensor h = b.conv1.forward(b.relu1.forward(b.select1.forward(b.bn1.forward(x))));
  h = b.conv2.forward(b.relu2.forward(b.select2.forward(b.bn2.forward(h))));
  return nn::add(h, b.shortcut.forward(x));
}

Tensor FusionModel::block_forward_train(ResidualBlock& b, const Tensor& x) {
  Tensor h = b.conv1.forward_train(b.relu1.forward_train(b.select1.forward_train(b.bn1.forward_train(x))));
  h = b.conv2.forward_train(b.relu2.forward_train(b.select2.forward_train(b.bn2.forward_train(h))));
  return nn::add(h, b.shortcut.forward_train(x));
}

Tensor FusionModel::block_backward(ResidualBlock& b, const Tensor& dy) {
  Tensor g = b.conv2.backward(dy);
  g = b.bn2.backward(b.select2.backward(b.relu2.backward(g)));
  g = b.conv1.backward(g);
  g = b.bn1.backward(b.select1.backward(b.relu1.backward(g)));
  return nn::add(g, b.shortcut.backward(dy));
}

Tensor FusionModel::trunk_features(const Tensor& images) const {
  Tensor h = trunk_.pool.forward(trunk_.stem.forward(images));
  for (const auto& b : trunk_.blocks) h = block_forward(b, h);
  return trunk_.relu_out.forward(trunk_.select_out.forward(trunk_.bn_out.forward(h)));
}

Tensor FusionModel::trunk_forward_train(const Tensor& x) {
  Tensor h = trunk_.pool.forward_train(trunk_.stem.forward_train(x));
  for (auto& b : trunk_.blocks) h = block_forward_train(b, h);
  return trunk_.relu_out.forward_train(trunk_.select_out.forward_train(trunk_.bn_out.forward_train(h)));
}

void FusionModel::trunk_backward(const Tensor& dy) {
  Tensor g = trunk_.bn_out.backward(trunk_.select_out.backward(trunk_.relu_out.backward(dy)));
  for (auto it = trunk_.blocks.rbegin(); it != trunk_.blocks.rend(); ++it) g = block_backward(*it, g);
  trunk_.stem.backward(trunk_.pool.backward(g));
}

// ----------------------------------------------------------------- fusion

Tensor FusionModel::fuse(std::size_t batch, const Tensor& series_feat, const Tensor& global, const Tensor& transformer) const {
  const std::size_t cs = config_.series_channels;
  const std::size_t ci = config_.image_channels();
  const std::size_t ct = ci * config_.trunk_side();
  Tensor fused({batch, config_.fusion_width()});
  for (std::size_t b = 0; b < batch; ++b) {
    double* row = fused.ptr() + b * config_.fusion_width();
    if (!series_feat.empty()) std::copy_n(series_feat.ptr() + b * cs, cs, row);
    if (!global.empty()) std::copy_n(global.ptr() + b * ci, ci, row + cs);
    if (!transformer.empty()) std::copy_n(transformer.ptr() + b * ct, ct, row + cs + ci);
  }
  return fused;
}

Tensor FusionModel::forward(const Tensor& series, const Tensor& images) const {
  check_inputs(series, images);
  const Tensor trunk = trunk_features(images);
  const Tensor s = uses_series() ? series_forward(series) : Tensor();
  const Tensor g = uses_global() ? global_head_.forward(trunk) : Tensor();
  const Tensor t = uses_transformer() ? height_max_.forward(drop_.forward(trunk)) : Tensor();
  return fusion_.forward(fuse(images.dim(0), s, g, t));
}

Tensor FusionModel::forward_train(const Tensor& series, const Tensor& images, std::uint64_t drop_seed) {
  check_inputs(series, images);
  const Tensor trunk = trunk_forward_train(images);
  const Tensor s = uses_series() ? series_forward_train(series) : Tensor();
  const Tensor g = uses_global() ? global_head_.forward_train(trunk) : Tensor();
  Tensor t;
  if (uses_transformer()) {
    Rng rng(drop_seed);
    t = height_max_.forward_train(drop_.forward_train(trunk, rng));
  }
  has_cache_ = true;
  return fusion_.forward_train(fuse(images.dim(0), s, g, t));
}

void FusionModel::backward(const Tensor& dlogits) {
  if (!has_cache_) fail(ErrorKind::NoForwardCache, "model backward without training forward");
  const Tensor dfused = fusion_.backward(dlogits);
  const std::size_t batch = dfused.dim(0);
  const std::size_t cs = config_.series_channels;
  const std::size_t ci = config_.image_channels();
  const std::size_t w = config_.trunk_side();
  const std::size_t fw = config_.fusion_width();

  if (uses_series()) {
    Tensor ds({batch, cs});
    for (std::size_t b = 0; b < batch; ++b) std::copy_n(dfused.ptr() + b * fw, cs, ds.ptr() + b * cs);
    series_backward(ds);
  }
  Tensor dtrunk({batch, ci, w, w});
  bool any = false;
  if (uses_global()) {
    Tensor dg({batch, ci});
    for (std::size_t b = 0; b < batch; ++b) std::copy_n(dfused.ptr() + b * fw + cs, ci, dg.ptr() + b * ci);
    dtrunk = global_head_.backward(dg);
    any = true;
  }
  if (uses_transformer()) {
    Tensor dt({batch, ci * w});
    for (std::size_t b = 0; b < batch; ++b) {
      std::copy_n(dfused.ptr() + b * fw + cs + ci, ci * w, dt.ptr() + b * ci * w);
    }
    const Tensor d = drop_.backward(height_max_.backward(dt));
    dtrunk = any ? nn::add(dtrunk, d) : d;
    any = true;
  }
  if (any) trunk_backward(dtrunk);
}

BranchFeatures FusionModel::extract_branch_features(const Tensor& series, const Tensor& images) const {
  check_inputs(series, images);
  if (series.dim(0) != 1) fail(ErrorKind::ShapeMismatch, "branch features are extracted one sample at a time");
  const Tensor trunk = trunk_features(images);
  const std::size_t cs = config_.series_channels;
  const std::size_t ci = config_.image_channels();
  BranchFeatures out;
  out.series.assign(cs, 0.0);
  out.image.assign(config_.image_feature_width(), 0.0);
  if (uses_series()) {
    const Tensor s = series_forward(series);
    std::copy_n(s.ptr(), cs, out.series.begin());
  }
  if (uses_global()) {
    const Tensor g = global_head_.forward(trunk);
    std::copy_n(g.ptr(), ci, out.image.begin());
  }
  if (uses_transformer()) {
    const Tensor t = height_max_.forward(drop_.forward(trunk));
    std::copy_n(t.ptr(), t.size(), out.image.begin() + static_cast<std::ptrdiff_t>(ci));
  }
  return out;
}

StateRefs FusionModel::state() {
  StateRefs refs;
  series_.conv_a.collect("series.conv_a", refs);
  series_.conv_b.collect("series.conv_b", refs);
  series_.mlp_1.collect("series.mlp_1", refs);
  series_.mlp_2.collect("series.mlp_2", refs);
  trunk_.stem.collect("trunk.stem", refs);
  for (std::size_t i = 0; i < 3; ++i) {
    auto& b = trunk_.blocks[i];
    const std::string p = "trunk.block" + std::to_string(i);
    b.bn1.collect(p + ".bn1", refs);
    b.select1.collect(p + ".select1", refs);
    b.conv1.collect(p + ".conv1", refs);
    b.bn2.collect(p + ".bn2", refs);
    b.select2.collect(p + ".select2", refs);
    b.conv2.collect(p + ".conv2", refs);
    b.shortcut.collect(p + ".shortcut", refs);
  }
  trunk_.bn_out.collect("trunk.bn_out", refs);
  trunk_.select_out.collect("trunk.select_out", refs);
  fusion_.collect("fusion", refs);
  return refs;
}

std::vector<Parameter*> FusionModel::parameters() {
  std::vector<Parameter*> out;
  for (auto& p : state().params) out.push_back(p.param);
  return out;
}

void FusionModel::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

std::size_t FusionModel::parameter_count() const {
  // state() only hands out pointers; nothing is modified here.
  std::size_t n = 0;
  for (auto& p : const_cast<FusionModel*>(this)->state().params) n += p.param->value.size();
  return n;
}

std::vector<BnUnit> FusionModel::bn_units() {
  std::vector<BnUnit> units;
  for (std::size_t i = 0; i < 3; ++i) {
    auto& b = trunk_.blocks[i];
    const std::string p = "trunk.block" + std::to_string(i);
    units.push_back({p + ".bn1", &b.bn1, &b.select1, false, i});
    units.push_back({p + ".bn2", &b.bn2, &b.select2, true, i});
  }
  units.push_back({"trunk.bn_out", &trunk_.bn_out, &trunk_.select_out, false, 3});
  return units;
}

void FusionModel::keep_mid_channels(std::size_t block, std::span<const std::size_t> keep) {
  if (block >= 3 || keep.empty()) fail(ErrorKind::PlanModelMismatch, "invalid block or empty channel set");
  auto& b = trunk_.blocks[block];
  for (auto k : keep) {
    if (k >= b.bn2.channels()) fail(ErrorKind::PlanModelMismatch, "channel index out of range");
  }
  b.conv1.keep_output_channels(keep);
  b.bn2.keep_channels(keep);
  b.select2.keep_channels(keep);
  b.conv2.keep_input_channels(keep);
  config_.stage_mid_channels[block] = keep.size();
  has_cache_ = false;
}

void FusionModel::zero_fusion_layer() {
  fusion_.weight.value.fill(0.0);
  fusion_.bias.value.fill(0.0);
}

Tensor series_batch(std::span<const std::vector<double>* const> series) {
  if (series.empty()) fail(ErrorKind::EmptyInput, "empty batch");
  const std::size_t len = series.front()->size();
  Tensor t({series.size(), 1, 1, len});
  for (std::size_t b = 0; b < series.size(); ++b) {
    if (series[b]->size() != len) fail(ErrorKind::ShapeMismatch, "series lengths differ within batch");
    std::copy(series[b]->begin(), series[b]->end(), t.ptr() + b * len);
  }
  return t;
}

Tensor image_batch(std::span<const GrayImage* const> images) {
  if (images.empty()) fail(ErrorKind::EmptyInput, "empty batch");
  const std::size_t n = images.front()->size();
  Tensor t({images.size(), 1, n, n});
  for (std::size_t b = 0; b < images.size(); ++b) {
    if (images[b]->size() != n) fail(ErrorKind::ShapeMismatch, "image sizes differ within batch");
    const auto px = images[b]->pixels();
    for (std::size_t k = 0; k < px.size(); ++k) t[b * n * n + k] = pixel_to_signed(px[k]);
  }
  return t;
}

}  // namespace gfd

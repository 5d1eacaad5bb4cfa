#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gfd/dataset.hpp"
#include "gfd/fusion_model.hpp"
#include "gfd/training.hpp"

namespace gfd {

/// Percentage of matching entries.
double accuracy(std::span<const int> predictions, std::span<const int> labels);

struct Polyline {
  std::vector<std::pair<double, double>> points;  // (x, y), x strictly increasing

  void validate() const;
};

/// Area under the broken line divided by the bounding rectangle x_max * y_max.
double ap_polyline(const Polyline& line);

enum class NoiseKind { Series, Image, Both };

std::string_view to_string(NoiseKind kind);
std::optional<NoiseKind> parse_noise_kind(std::string_view name);

/// How the image side is corrupted. Perturb replaces pixels with uniform
/// values, SaltPepper with 0/255, Gaussian adds noise of deviation `level`
/// in the [-1, 1] pixel domain, Diffusion runs the closed-form forward
/// process to step round(level * 1000) of the default schedule.
enum class ImageNoise { Perturb, SaltPepper, Gaussian, Diffusion };

std::string_view to_string(ImageNoise method);
std::optional<ImageNoise> parse_image_noise(std::string_view name);

struct SweepRow {
  NoiseKind kind = NoiseKind::Series;
  double level = 0.0;
  double accuracy = 0.0;  // percent
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Levels per corruption kind; an empty list skips that kind.
struct SweepLevels {
  std::vector<double> series{0.0, 0.05, 0.1, 0.2, 0.5};
  std::vector<double> image{0.0, 0.05, 0.1, 0.2, 0.5};
  std::vector<double> both{0.0, 0.05, 0.1, 0.2, 0.5};
  ImageNoise image_noise = ImageNoise::Perturb;
};

/// Test-time corruption of one sample. Series noise rebuilds the image from
/// the noisy series; image noise replaces a fraction of pixels; both does
/// the series step and then corrupts the rebuilt image. Level 0 returns the
/// sample untouched.
PairedSample corrupt_sample(const PairedSample& sample, NoiseKind kind, double level,
                            std::uint64_t seed, ImageNoise method = ImageNoise::Perturb);

/// Accuracy of `model` for every (kind, level) cell. Each cell draws from
/// its own derived seed.
SweepResult robustness_sweep(const FusionModel& model, std::span<const PairedSample> test_set,
                             const SweepLevels& levels, LossMode mode, std::uint64_t seed);

/// Polyline (level, accuracy / 100) of one kind, scored with ap_polyline.
double ap_from_sweep(const SweepResult& sweep, NoiseKind kind);

/// CSV: kind,level,accuracy.
std::string encode_sweep_csv(const SweepResult& sweep);

/// Softmax of a feature vector.
std::vector<double> feature_to_distribution(std::span<const double> features);

/// Max-pools `features` in contiguous groups down to `length` entries.
std::vector<double> group_max(std::span<const double> features, std::size_t length);

/// Brings two feature vectors to a common length by group-max pooling the
/// longer one.
std::pair<std::vector<double>, std::vector<double>> align_features(std::span<const double> a,
                                                                   std::span<const double> b);

/// D(p || q) in nats. q is floored at 1e-12 and renormalized first.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// D(image || series) of one sample's pre-fusion branch features.
double branch_kl(const FusionModel& model, const PairedSample& sample);

/// Mean branch_kl over a sample set.
double mean_branch_kl(const FusionModel& model, std::span<const PairedSample> samples);

struct AblationRow {
  Variant variant = Variant::Whole;
  NoiseKind kind = NoiseKind::Series;
  double level = 0.0;
  double accuracy = 0.0;
};

struct AblationTable {
  std::vector<AblationRow> rows;
};

/// Trains each variant with the same seed and configuration, then sweeps it.
AblationTable ablation_run(const Dataset& dataset, std::span<const Variant> variants,
                           const TrainConfig& config, const SweepLevels& levels);

/// CSV: variant,kind,level,accuracy.
std::string encode_ablation_csv(const AblationTable& table);

}  // namespace gfd

#include "gfd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gfd/augmentation.hpp"
#include "gfd/csv.hpp"
#include "gfd/error.hpp"
#include "gfd/rng.hpp"

namespace gfd {

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.empty()) fail(ErrorKind::EmptyInput, "accuracy of an empty prediction set");
  if (predictions.size() != labels.size()) fail(ErrorKind::LengthMismatch, "predictions and labels differ in length");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) correct += predictions[i] == labels[i] ? 1 : 0;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(predictions.size());
}

void Polyline::validate() const {
  if (points.size() < 2) fail(ErrorKind::InsufficientPoints, "a polyline needs at least 2 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [x, y] = points[i];
    if (!(x >= 0.0) || !(y >= 0.0)) fail(ErrorKind::DomainError, "polyline coordinates must be non-negative");
    if (i > 0 && !(x > points[i - 1].first)) fail(ErrorKind::DomainError, "polyline x must be strictly increasing");
  }
}

double ap_polyline(const Polyline& line) {
  line.validate();
  const double x_max = line.points.back().first;
  double y_max = 0.0;
  for (const auto& p : line.points) y_max = std::max(y_max, p.second);
  if (x_max * y_max == 0.0) fail(ErrorKind::DegenerateRectangle, "bounding rectangle has zero area");
  double area = 0.0;
  for (std::size_t i = 1; i < line.points.size(); ++i) {
    const auto [x0, y0] = line.points[i - 1];
    const auto [x1, y1] = line.points[i];
    area += (x1 - x0) * (y1 + y0) / 2.0;
  }
  return area / (x_max * y_max);
}

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Series: return "series";
    case NoiseKind::Image: return "image";
    case NoiseKind::Both: return "both";
  }
  return "?";
}

std::optional<NoiseKind> parse_noise_kind(std::string_view name) {
  for (auto k : {NoiseKind::Series, NoiseKind::Image, NoiseKind::Both}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(ImageNoise method) {
  switch (method) {
    case ImageNoise::Perturb: return "perturb";
    case ImageNoise::SaltPepper: return "salt_pepper";
    case ImageNoise::Gaussian: return "gaussian";
    case ImageNoise::Diffusion: return "diffusion";
  }
  return "?";
}

std::optional<ImageNoise> parse_image_noise(std::string_view name) {
  for (auto m : {ImageNoise::Perturb, ImageNoise::SaltPepper, ImageNoise::Gaussian, ImageNoise::Diffusion}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

namespace {

GrayImage corrupt_image(const GrayImage& image, double level, std::uint64_t seed, ImageNoise method) {
  switch (method) {
    case ImageNoise::Perturb: return perturb_image(image, std::min(level, 1.0), seed);
    case ImageNoise::SaltPepper: return salt_pepper_image(image, std::min(level, 1.0), seed);
    case ImageNoise::Gaussian: return gaussian_image_noise(image, level, seed);
    case ImageNoise::Diffusion: {
      static const NoiseSchedule schedule = make_schedule(1000, 1e-4, 0.02);
      const auto t = static_cast<std::size_t>(std::round(std::min(level, 1.0) * 1000.0));
      return diffuse_image(image, std::max<std::size_t>(t, 1), schedule, seed);
    }
  }
  return image;
}

}  // namespace

PairedSample corrupt_sample(const PairedSample& sample, NoiseKind kind, double level, std::uint64_t seed,
                            ImageNoise method) {
  if (!(level >= 0.0)) fail(ErrorKind::DomainError, "noise level must be non-negative");
  if (level == 0.0) return sample;
  PairedSample out = sample;
  const std::size_t n = sample.image.size();
  if (kind == NoiseKind::Series || kind == NoiseKind::Both) {
    out.window.values = add_series_noise(sample.window.values, level, mix_seed(seed, 0));
    out.image = series_to_image(out.window.values, n);
  }
  if (kind == NoiseKind::Image || kind == NoiseKind::Both) {
    out.image = corrupt_image(out.image, level, mix_seed(seed, 1), method);
  }
  return out;
}

SweepResult robustness_sweep(const FusionModel& model, std::span<const PairedSample> test_set,
                             const SweepLevels& levels, LossMode mode, std::uint64_t seed) {
  if (test_set.empty()) fail(ErrorKind::EmptyDataset, "robustness sweep needs a test set");
  const auto labels = targets_of(test_set, mode);
  SweepResult result;
  const std::pair<NoiseKind, const std::vector<double>*> kinds[] = {
      {NoiseKind::Series, &levels.series}, {NoiseKind::Image, &levels.image}, {NoiseKind::Both, &levels.both}};
  std::optional<double> clean;
  for (const auto& [kind, list] : kinds) {
    for (std::size_t li = 0; li < list->size(); ++li) {
      const double level = (*list)[li];
      if (!(level >= 0.0)) fail(ErrorKind::DomainError, "noise level must be non-negative");
      double acc;
      if (level == 0.0) {
        if (!clean) clean = accuracy(predict(model, test_set, mode), labels);
        acc = *clean;
      } else {
        const std::uint64_t cell = mix_seed(seed, static_cast<std::uint64_t>(kind) * 1000 + li);
        std::vector<PairedSample> noisy;
        noisy.reserve(test_set.size());
        for (std::size_t i = 0; i < test_set.size(); ++i) {
          noisy.push_back(corrupt_sample(test_set[i], kind, level, mix_seed(cell, i), levels.image_noise));
        }
        acc = accuracy(predict(model, noisy, mode), labels);
      }
      result.rows.push_back({kind, level, acc});
    }
  }
  return result;
}

double ap_from_sweep(const SweepResult& sweep, NoiseKind kind) {
  Polyline line;
  for (const auto& r : sweep.rows) {
    if (r.kind == kind) line.points.emplace_back(r.level, r.accuracy / 100.0);
  }
  if (line.points.size() < 2) {
    fail(ErrorKind::InsufficientPoints, "need at least 2 levels of " + std::string(to_string(kind)) + " noise");
  }
  std::sort(line.points.begin(), line.points.end());
  return ap_polyline(line);
}

std::string encode_sweep_csv(const SweepResult& sweep) {
  CsvWriter csv({"kind", "level", "accuracy"});
  for (const auto& r : sweep.rows) csv.row(to_string(r.kind), r.level, r.accuracy);
  return csv.str();
}

std::vector<double> feature_to_distribution(std::span<const double> features) {
  if (features.empty()) fail(ErrorKind::EmptyInput, "cannot normalize an empty feature vector");
  const double top = *std::max_element(features.begin(), features.end());
  std::vector<double> p(features.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    p[i] = std::exp(features[i] - top);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

std::vector<double> group_max(std::span<const double> features, std::size_t length) {
  if (features.empty() || length == 0) fail(ErrorKind::EmptyInput, "group pooling of an empty vector");
  if (length > features.size()) fail(ErrorKind::LengthMismatch, "cannot pool to a longer length");
  const std::size_t n = features.size();
  std::vector<double> out(length, -std::numeric_limits<double>::infinity());
  for (std::size_t g = 0; g < length; ++g) {
    const std::size_t lo = g * n / length;
    const std::size_t hi = (g + 1) * n / length;
    for (std::size_t i = lo; i < hi; ++i) out[g] = std::max(out[g], features[i]);
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> align_features(std::span<const double> a,
                                                                   std::span<const double> b) {
  if (a.empty() || b.empty()) fail(ErrorKind::EmptyInput, "cannot align an empty feature vector");
  if (a.size() > b.size()) return {group_max(a, b.size()), {b.begin(), b.end()}};
  if (b.size() > a.size()) return {{a.begin(), a.end()}, group_max(b, a.size())};
  return {{a.begin(), a.end()}, {b.begin(), b.end()}};
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) fail(ErrorKind::SupportMismatch, "distributions have different support sizes");
  if (p.empty()) fail(ErrorKind::EmptyInput, "empty distributions");
  constexpr double kFloor = 1e-12;
  std::vector<double> qf(q.begin(), q.end());
  double sum = 0.0;
  for (auto& v : qf) {
    v = std::max(v, kFloor);
    sum += v;
  }
  for (auto& v : qf) v /= sum;
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) d += p[i] * std::log(p[i] / qf[i]);
  }
  return std::max(d, 0.0);
}

double branch_kl(const FusionModel& model, const PairedSample& sample) {
  const std::vector<double>* s = &sample.window.values;
  const GrayImage* im = &sample.image;
  const auto feats = model.extract_branch_features(series_batch({&s, 1}), image_batch({&im, 1}));
  auto [img, ser] = align_features(feats.image, feats.series);
  return kl_divergence(feature_to_distribution(img), feature_to_distribution(ser));
}

double mean_branch_kl(const FusionModel& model, std::span<const PairedSample> samples) {
  if (samples.empty()) fail(ErrorKind::EmptyInput, "no samples for branch divergence");
  double sum = 0.0;
  for (const auto& s : samples) sum += branch_kl(model, s);
  return sum / static_cast<double>(samples.size());
}

AblationTable ablation_run(const Dataset& dataset, std::span<const Variant> variants,
                           const TrainConfig& config, const SweepLevels& levels) {
  if (dataset.train.empty() || dataset.test.empty()) fail(ErrorKind::EmptyDataset, "ablation needs train and test data");
  const std::size_t series_len = dataset.train.front().window.values.size();
  const std::size_t image_size = dataset.train.front().image.size();
  AblationTable table;
  for (Variant v : variants) {
    FusionModel model = make_model(series_len, image_size, config, v);
    train(model, dataset.train, config);
    const auto sweep = robustness_sweep(model, dataset.test, levels, config.loss_mode, mix_seed(config.seed, 300));
    for (const auto& r : sweep.rows) table.rows.push_back({v, r.kind, r.level, r.accuracy});
  }
  return table;
}

std::string encode_ablation_csv(const AblationTable& table) {
  CsvWriter csv({"variant", "kind", "level", "accuracy"});
  for (const auto& r : table.rows) csv.row(to_string(r.variant), to_string(r.kind), r.level, r.accuracy);
  return csv.str();
}

}  // namespace gfd

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gfd/series_transform.hpp"

namespace gfd {

enum class ClassLabel : std::uint8_t { Normal = 0, InnerRace = 1, OuterRace = 2, Ball = 3 };

inline constexpr std::array<ClassLabel, 4> kAllLabels{ClassLabel::Normal, ClassLabel::InnerRace,
                                                      ClassLabel::OuterRace, ClassLabel::Ball};

std::string_view to_string(ClassLabel label);
std::optional<ClassLabel> parse_label(std::string_view name);

/// Binary target used by the sigmoid head: 0 for Normal, 1 for any fault.
inline int binary_target(ClassLabel label) { return label == ClassLabel::Normal ? 0 : 1; }

struct TimeWindow {
  std::vector<double> values;
  ClassLabel label = ClassLabel::Normal;
  std::string source_id;
  std::size_t offset = 0;  // sample offset within the source signal
};

/// Parameters of the synthetic bearing signal.
///
/// Normal: shaft sinusoid plus a Gaussian floor. Faults add a train of
/// exponentially decaying impulses repeating at the defect frequency. The
/// defect frequency is `fault_freq` when positive, otherwise the class
/// multiplier times `shaft_freq`.
struct SyntheticSpec {
  double shaft_freq = 25.0;        // Hz
  double shaft_amplitude = 1.0;
  double fault_freq = 0.0;         // Hz; 0 selects the class multiplier
  double inner_multiplier = 5.4;
  double outer_multiplier = 3.6;
  double ball_multiplier = 4.7;
  double impulse_decay = 300.0;    // 1/s
  double impulse_amplitude = 4.0;
  double base_noise_epsilon = 0.2; // floor sigma relative to shaft rms
  double sample_rate = 2000.0;     // Hz
  double duration = 10.0;          // s

  double defect_frequency(ClassLabel label) const;
  void validate(ClassLabel label) const;
};

/// Continuous synthetic signal of `samples` points. Draw order does not
/// depend on the label, so fault - normal under one seed is exactly the
/// impulse train.
std::vector<double> synthesize_signal(const SyntheticSpec& spec, ClassLabel label,
                                      std::size_t samples, std::uint64_t seed);

/// Cuts `n_windows` consecutive non-overlapping windows from one signal.
std::vector<TimeWindow> generate_synthetic(const SyntheticSpec& spec, ClassLabel label,
                                           std::size_t n_windows, std::size_t window_len,
                                           std::uint64_t seed);

/// One value per line, optional non-numeric header on line 1.
RawSeries parse_series_csv(std::string_view text, std::string_view source_name);
RawSeries load_csv(const std::filesystem::path& path);

std::vector<TimeWindow> window_series(std::span<const double> values, std::size_t window_len,
                                      std::size_t stride, ClassLabel label,
                                      std::string_view source_id);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per-class test count round(count * test_fraction), chosen by a seeded
/// shuffle within each class. Index lists come back sorted.
SplitIndices stratified_split(std::span<const ClassLabel> labels, double test_fraction,
                              std::uint64_t seed);

template <typename T>
struct Split {
  std::vector<T> train;
  std::vector<T> test;
};

template <typename T>
Split<T> stratified_split(std::span<const T> samples, double test_fraction, std::uint64_t seed) {
  std::vector<ClassLabel> labels;
  labels.reserve(samples.size());
  for (const auto& s : samples) labels.push_back(s.label);
  const auto idx = stratified_split(std::span<const ClassLabel>(labels), test_fraction, seed);
  Split<T> out;
  for (auto i : idx.train) out.train.push_back(samples[i]);
  for (auto i : idx.test) out.test.push_back(samples[i]);
  return out;
}

struct PairedSample {
  TimeWindow window;
  GrayImage image;
  ClassLabel label = ClassLabel::Normal;
};

std::vector<PairedSample> assemble_pairs(std::span<const TimeWindow> windows, std::size_t image_size);

/// Everything needed to rebuild a labelled dataset deterministically.
struct DatasetConfig {
  SyntheticSpec synthetic;
  // Per-class window counts for the synthetic source.
  std::array<std::size_t, 4> windows_per_class{250, 85, 85, 80};
  // CSV sources; when any is set the synthetic generator is not used.
  std::array<std::filesystem::path, 4> csv_paths{};
  std::size_t window_len = 64;
  std::size_t window_stride = 64;
  std::size_t image_size = 64;
  double test_fraction = 0.2;

  bool uses_csv() const;
};

struct Dataset {
  std::vector<PairedSample> train;
  std::vector<PairedSample> test;
};

Dataset build_dataset(const DatasetConfig& config, std::uint64_t seed);

/// Manifest CSV: source_id,label,split,window_offset.
std::string encode_manifest(const Dataset& dataset);

/// "<source_id>_<offset>.pgm"
std::string image_filename(const TimeWindow& window);

}  // namespace gfd

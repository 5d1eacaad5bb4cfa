#include "gfd/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gfd/csv.hpp"
#include "gfd/error.hpp"
#include "gfd/io.hpp"
#include "gfd/rng.hpp"

namespace gfd {

std::string_view to_string(ClassLabel label) {
  switch (label) {
    case ClassLabel::Normal: return "normal";
    case ClassLabel::InnerRace: return "inner";
    case ClassLabel::OuterRace: return "outer";
    case ClassLabel::Ball: return "ball";
  }
  return "unknown";
}

std::optional<ClassLabel> parse_label(std::string_view name) {
  for (auto l : kAllLabels) {
    if (to_string(l) == name) return l;
  }
  return std::nullopt;
}

double SyntheticSpec::defect_frequency(ClassLabel label) const {
  if (fault_freq > 0.0) return fault_freq;
  switch (label) {
    case ClassLabel::InnerRace: return inner_multiplier * shaft_freq;
    case ClassLabel::OuterRace: return outer_multiplier * shaft_freq;
    case ClassLabel::Ball: return ball_multiplier * shaft_freq;
    case ClassLabel::Normal: break;
  }
  return 0.0;
}

void SyntheticSpec::validate(ClassLabel label) const {
  if (!(shaft_freq > 0.0 && sample_rate > 0.0 && duration > 0.0 && impulse_decay > 0.0)) {
    fail(ErrorKind::DomainError, "synthetic rates and duration must be > 0");
  }
  if (!(impulse_amplitude >= 0.0 && base_noise_epsilon >= 0.0)) {
    fail(ErrorKind::DomainError, "amplitudes and noise level must be >= 0");
  }
  if (label != ClassLabel::Normal) {
    const double f = defect_frequency(label);
    if (!(f > 0.0 && f < sample_rate / 2.0)) {
      fail(ErrorKind::DomainError, "defect frequency must lie in (0, sample_rate/2)");
    }
  }
}

std::vector<double> synthesize_signal(const SyntheticSpec& spec, ClassLabel label,
                                      std::size_t samples, std::uint64_t seed) {
  spec.validate(label);
  Rng rng(seed);
  const double phase = 2.0 * std::numbers::pi * rng.uniform();
  const double impulse_phase = rng.uniform();  // fraction of one defect period
  const double floor_sigma = spec.base_noise_epsilon * spec.shaft_amplitude / std::numbers::sqrt2;
  const double dt = 1.0 / spec.sample_rate;

  std::vector<double> x(samples);
  for (std::size_t n = 0; n < samples; ++n) {
    const double t = static_cast<double>(n) * dt;
    x[n] = spec.shaft_amplitude * std::sin(2.0 * std::numbers::pi * spec.shaft_freq * t + phase) +
           floor_sigma * rng.gaussian();
  }
  if (label == ClassLabel::Normal || spec.impulse_amplitude == 0.0) return x;

  const double period = 1.0 / spec.defect_frequency(label);
  const double span = static_cast<double>(samples) * dt;
  // Tails beyond 40 time constants are below double resolution.
  const double tail = 40.0 / spec.impulse_decay;
  for (double onset = impulse_phase * period; onset < span; onset += period) {
    auto first = static_cast<std::size_t>(std::ceil(onset / dt));
    for (std::size_t n = first; n < samples; ++n) {
      const double age = static_cast<double>(n) * dt - onset;
      if (age > tail) break;
      x[n] += spec.impulse_amplitude * std::exp(-spec.impulse_decay * age);
    }
  }
  return x;
}

std::vector<TimeWindow> generate_synthetic(const SyntheticSpec& spec, ClassLabel label,
                                           std::size_t n_windows, std::size_t window_len,
                                           std::uint64_t seed) {
  if (n_windows < 1 || window_len < 2) fail(ErrorKind::DomainError, "need n_windows >= 1, window_len >= 2");
  spec.validate(label);
  const auto available = static_cast<std::size_t>(std::floor(spec.duration * spec.sample_rate));
  if (n_windows * window_len > available) {
    fail(ErrorKind::InsufficientDuration,
         "duration supplies " + std::to_string(available) + " samples, need " +
             std::to_string(n_windows * window_len));
  }
  const auto signal = synthesize_signal(spec, label, n_windows * window_len, seed);
  return window_series(signal, window_len, window_len, label,
                       "syn_" + std::string(to_string(label)));
}

RawSeries parse_series_csv(std::string_view text, std::string_view source_name) {
  RawSeries out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (!line.empty() && line.front() == '+') line.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    const bool ok = ec == std::errc{} && ptr == line.data() + line.size();
    if (!ok) {
      const bool looks_like_header = line_no == 1 && std::from_chars(line.data(), line.data() + line.size(), v).ec != std::errc{};
      if (looks_like_header) continue;
      fail(ErrorKind::ParseError, std::string(source_name) + ":" + std::to_string(line_no) +
                                      ": not a real number: '" + std::string(line) + "'");
    }
    if (!std::isfinite(v)) {
      fail(ErrorKind::ParseError, std::string(source_name) + ":" + std::to_string(line_no) +
                                      ": non-finite value");
    }
    out.values.push_back(v);
    if (end == text.size()) break;
  }
  if (out.values.empty()) fail(ErrorKind::EmptyFile, std::string(source_name) + ": no values");
  return out;
}

RawSeries load_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorKind::IoError, path.string() + ": no such file");
  return parse_series_csv(read_file(path), path.string());
}

std::vector<TimeWindow> window_series(std::span<const double> values, std::size_t window_len,
                                      std::size_t stride, ClassLabel label,
                                      std::string_view source_id) {
  if (stride < 1 || window_len < 1) fail(ErrorKind::DomainError, "window length and stride must be >= 1");
  if (values.size() < window_len) {
    fail(ErrorKind::TooShort, "series of " + std::to_string(values.size()) +
                                  " samples is shorter than window " + std::to_string(window_len));
  }
  const std::size_t count = (values.size() - window_len) / stride + 1;
  std::vector<TimeWindow> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t off = k * stride;
    TimeWindow w;
    w.values.assign(values.begin() + static_cast<std::ptrdiff_t>(off),
                    values.begin() + static_cast<std::ptrdiff_t>(off + window_len));
    w.label = label;
    w.source_id = std::string(source_id);
    w.offset = off;
    out.push_back(std::move(w));
  }
  return out;
}

SplitIndices stratified_split(std::span<const ClassLabel> labels, double test_fraction,
                              std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail(ErrorKind::DomainError, "test fraction must lie in (0, 1)");
  }
  SplitIndices out;
  for (auto label : kAllLabels) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) members.push_back(i);
    }
    if (members.empty()) continue;
    if (members.size() < 2) {
      fail(ErrorKind::ClassTooSmall, "class '" + std::string(to_string(label)) + "' has fewer than 2 samples");
    }
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.below(i)]);
    }
    const auto n_test = static_cast<std::size_t>(std::round(static_cast<double>(members.size()) * test_fraction));
    out.test.insert(out.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<PairedSample> assemble_pairs(std::span<const TimeWindow> windows, std::size_t image_size) {
  std::vector<PairedSample> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    out.push_back({w, series_to_image(w.values, image_size), w.label});
  }
  return out;
}

bool DatasetConfig::uses_csv() const {
  return std::any_of(csv_paths.begin(), csv_paths.end(), [](const auto& p) { return !p.empty(); });
}

Dataset build_dataset(const DatasetConfig& config, std::uint64_t seed) {
  std::vector<TimeWindow> windows;
  for (auto label : kAllLabels) {
    const auto idx = static_cast<std::size_t>(label);
    std::vector<TimeWindow> part;
    if (config.uses_csv()) {
      if (config.csv_paths[idx].empty()) continue;
      const auto series = load_csv(config.csv_paths[idx]);
      part = window_series(series.values, config.window_len, config.window_stride, label,
                           config.csv_paths[idx].stem().string());
    } else {
      if (config.windows_per_class[idx] == 0) continue;
      part = generate_synthetic(config.synthetic, label, config.windows_per_class[idx],
                                config.window_len, mix_seed(seed, 100 + idx));
    }
    windows.insert(windows.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
  }
  if (windows.empty()) fail(ErrorKind::EmptyDataset, "dataset configuration yields no windows");
  const auto split = stratified_split(std::span<const TimeWindow>(windows), config.test_fraction,
                                      mix_seed(seed, 200));
  Dataset ds;
  ds.train = assemble_pairs(split.train, config.image_size);
  ds.test = assemble_pairs(split.test, config.image_size);
  return ds;
}

std::string encode_manifest(const Dataset& dataset) {
  CsvWriter csv({"source_id", "label", "split", "window_offset"});
  for (const auto& s : dataset.train) csv.row(s.window.source_id, to_string(s.label), "train", s.window.offset);
  for (const auto& s : dataset.test) csv.row(s.window.source_id, to_string(s.label), "test", s.window.offset);
  return csv.str();
}

std::string image_filename(const TimeWindow& window) {
  return window.source_id + "_" + std::to_string(window.offset) + ".pgm";
}

}  // namespace gfd

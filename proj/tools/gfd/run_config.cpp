#include "run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <sstream>

#include "gfd/csv.hpp"
#include "gfd/error.hpp"
#include "gfd/io.hpp"

namespace gfd::cli {
namespace {

namespace pt = boost::property_tree;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

class Reader {
 public:
  Reader(std::string_view source, std::string section) : source_(source), section_(std::move(section)) {}

  [[noreturn]] void bad(std::string_view key, std::string_view why) const {
    fail(ErrorKind::ConfigError,
         std::string(source_) + ": [" + section_ + "] " + std::string(key) + ": " + std::string(why));
  }

  double real(std::string_view key, std::string_view text) const {
    text = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) bad(key, "expected a number, got '" + std::string(text) + "'");
    return v;
  }

  std::uint64_t count(std::string_view key, std::string_view text) const {
    text = trim(text);
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      bad(key, "expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
  }

  bool flag(std::string_view key, std::string_view text) const {
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    bad(key, "expected true or false");
  }

  template <typename F>
  auto list(std::string_view key, std::string_view text, F item) const {
    std::vector<decltype(item(key, text))> out;
    text = trim(text);
    if (text.empty()) return out;
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      out.push_back(item(key, trim(piece)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  }

 private:
  std::string_view source_;
  std::string section_;
};

void read_dataset(const pt::ptree& sec, const Reader& r, const std::filesystem::path& base, DatasetConfig& d) {
  auto& s = d.synthetic;
  for (const auto& [key, node] : sec) {
    const std::string v = node.data();
    auto csv_path = [&](std::size_t idx) {
      std::filesystem::path p(std::string(trim(v)));
      d.csv_paths[idx] = p.is_absolute() ? p : base / p;
    };
    if (key == "normal_csv") csv_path(0);
    else if (key == "inner_csv") csv_path(1);
    else if (key == "outer_csv") csv_path(2);
    else if (key == "ball_csv") csv_path(3);
    else if (key == "window_len") d.window_len = r.count(key, v);
    else if (key == "window_stride") d.window_stride = r.count(key, v);
    else if (key == "image_size") d.image_size = r.count(key, v);
    else if (key == "test_fraction") d.test_fraction = r.real(key, v);
    else if (key == "windows_normal") d.windows_per_class[0] = r.count(key, v);
    else if (key == "windows_inner") d.windows_per_class[1] = r.count(key, v);
    else if (key == "windows_outer") d.windows_per_class[2] = r.count(key, v);
    else if (key == "windows_ball") d.windows_per_class[3] = r.count(key, v);
    else if (key == "shaft_freq") s.shaft_freq = r.real(key, v);
    else if (key == "shaft_amplitude") s.shaft_amplitude = r.real(key, v);
    else if (key == "fault_freq") s.fault_freq = r.real(key, v);
    else if (key == "inner_multiplier") s.inner_multiplier = r.real(key, v);
    else if (key == "outer_multiplier") s.outer_multiplier = r.real(key, v);
    else if (key == "ball_multiplier") s.ball_multiplier = r.real(key, v);
    else if (key == "impulse_decay") s.impulse_decay = r.real(key, v);
    else if (key == "impulse_amplitude") s.impulse_amplitude = r.real(key, v);
    else if (key == "noise_floor") s.base_noise_epsilon = r.real(key, v);
    else if (key == "sample_rate") s.sample_rate = r.real(key, v);
    else if (key == "duration") s.duration = r.real(key, v);
    else r.bad(key, "unknown key");
  }
}

void read_train(const pt::ptree& sec, const Reader& r, TrainConfig& t) {
  for (const auto& [key, node] : sec) {
    const std::string v = node.data();
    if (key == "batch_size") t.batch_size = r.count(key, v);
    else if (key == "initial_lr") t.initial_lr = r.real(key, v);
    else if (key == "lr_decay") t.lr_decay = r.real(key, v);
    else if (key == "decay_every") t.decay_every = r.count(key, v);
    else if (key == "epochs") t.epochs = r.count(key, v);
    else if (key == "channel_scale") t.channel_scale = r.real(key, v);
    else if (key == "flip_probability") t.flip_probability = r.real(key, v);
    else if (key == "loss_mode") {
      const auto m = parse_loss_mode(trim(v));
      if (!m) r.bad(key, "expected binary_sigmoid or multiclass_softmax");
      t.loss_mode = *m;
    } else {
      r.bad(key, "unknown key");
    }
  }
}

void read_augment(const pt::ptree& sec, const Reader& r, RunConfig& c) {
  auto real = [&](std::string_view k, std::string_view s) { return r.real(k, s); };
  auto count = [&](std::string_view k, std::string_view s) { return static_cast<std::size_t>(r.count(k, s)); };
  for (const auto& [key, node] : sec) {
    const std::string v = node.data();
    if (key == "epsilons") c.train.augment_epsilons = r.list(key, v, real);
    else if (key == "schedule_steps") c.augment.schedule_steps = r.count(key, v);
    else if (key == "beta_start") c.augment.beta_start = r.real(key, v);
    else if (key == "beta_end") c.augment.beta_end = r.real(key, v);
    else if (key == "diffusion_steps") c.augment.diffusion_steps = r.list(key, v, count);
    else if (key == "perturb_fractions") c.augment.perturb_fractions = r.list(key, v, real);
    else r.bad(key, "unknown key");
  }
}

void read_sweep(const pt::ptree& sec, const Reader& r, SweepSettings& s) {
  auto real = [&](std::string_view k, std::string_view v) { return r.real(k, v); };
  auto variant = [&](std::string_view k, std::string_view v) {
    const auto parsed = parse_variant(v);
    if (!parsed) r.bad(k, "unknown variant '" + std::string(v) + "'");
    return *parsed;
  };
  for (const auto& [key, node] : sec) {
    const std::string v = node.data();
    if (key == "series_levels") s.levels.series = r.list(key, v, real);
    else if (key == "image_levels") s.levels.image = r.list(key, v, real);
    else if (key == "both_levels") s.levels.both = r.list(key, v, real);
    else if (key == "prune_rates") s.prune_rates = r.list(key, v, real);
    else if (key == "finetune_epochs") s.finetune_epochs = r.count(key, v);
    else if (key == "variants") s.variants = r.list(key, v, variant);
    else if (key == "image_noise") {
      const auto m = parse_image_noise(trim(v));
      if (!m) r.bad(key, "expected perturb, salt_pepper, gaussian or diffusion");
      s.levels.image_noise = *m;
    } else if (key == "normalized_selector") s.normalized_selector = r.flag(key, v);
    else r.bad(key, "unknown key");
  }
}

void read_run(const pt::ptree& sec, const Reader& r, const std::filesystem::path& base, RunConfig& c) {
  for (const auto& [key, node] : sec) {
    const std::string v = node.data();
    if (key == "seed") c.seed = r.count(key, v);
    else if (key == "out") {
      std::filesystem::path p(std::string(trim(v)));
      c.out_dir = p.is_absolute() ? p : base / p;
    } else {
      r.bad(key, "unknown key");
    }
  }
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += fmt(xs[i]);
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  const auto& d = dataset;
  if (d.image_size == 0 || d.image_size % 32 != 0) {
    fail(ErrorKind::ConfigError, "image_size must be a positive multiple of 32, got " + std::to_string(d.image_size));
  }
  if (d.window_len < d.image_size) fail(ErrorKind::ConfigError, "window_len must be at least image_size");
  if (d.window_stride == 0) fail(ErrorKind::ConfigError, "window_stride must be positive");
  if (!(d.test_fraction > 0.0 && d.test_fraction < 1.0)) fail(ErrorKind::ConfigError, "test_fraction must lie in (0, 1)");
  if (d.uses_csv()) {
    for (std::size_t i = 0; i < d.csv_paths.size(); ++i) {
      if (d.csv_paths[i].empty()) {
        fail(ErrorKind::ConfigError, "CSV source for class " + std::string(to_string(kAllLabels[i])) + " is missing");
      }
      if (!std::filesystem::exists(d.csv_paths[i])) {
        fail(ErrorKind::ConfigError, "no such file: " + d.csv_paths[i].string());
      }
    }
  }
  if (train.batch_size == 0) fail(ErrorKind::ConfigError, "batch_size must be positive");
  if (train.decay_every == 0) fail(ErrorKind::ConfigError, "decay_every must be positive");
  if (!(train.initial_lr > 0.0)) fail(ErrorKind::ConfigError, "initial_lr must be positive");
  if (!(train.channel_scale > 0.0 && train.channel_scale <= 1.0)) fail(ErrorKind::ConfigError, "channel_scale must lie in (0, 1]");
  if (!(train.flip_probability >= 0.0 && train.flip_probability <= 1.0)) {
    fail(ErrorKind::ConfigError, "flip_probability must lie in [0, 1]");
  }
  for (double e : train.augment_epsilons) {
    if (!(e > 0.0)) fail(ErrorKind::ConfigError, "augmentation epsilons must be positive");
  }
  for (double rate : sweep.prune_rates) {
    if (!(rate >= 0.0 && rate < 100.0)) fail(ErrorKind::ConfigError, "prune_rates are percentages in [0, 100)");
  }
  for (const auto* levels : {&sweep.levels.series, &sweep.levels.image, &sweep.levels.both}) {
    for (double l : *levels) {
      if (!(l >= 0.0)) fail(ErrorKind::ConfigError, "noise levels must be non-negative");
    }
  }
  if (sweep.levels.image_noise != ImageNoise::Gaussian) {
    for (double l : sweep.levels.image) {
      if (l > 1.0) fail(ErrorKind::ConfigError, "image levels for this image_noise must lie in [0, 1]");
    }
  }
  for (double f : augment.perturb_fractions) {
    if (!(f >= 0.0 && f <= 1.0)) fail(ErrorKind::ConfigError, "perturb_fractions must lie in [0, 1]");
  }
  for (auto t : augment.diffusion_steps) {
    if (t == 0 || t > augment.schedule_steps) fail(ErrorKind::ConfigError, "diffusion_steps must lie in [1, schedule_steps]");
  }
}

namespace {

// Drops "  # note" / "  ; note" trailing a value; the INI reader only
// understands whole-line comments.
std::string strip_inline_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool after_space = false;
  bool in_comment = false;
  for (char c : text) {
    if (c == '\n') {
      in_comment = false;
      after_space = false;
      out.push_back(c);
      continue;
    }
    if (in_comment) continue;
    if ((c == '#' || c == ';') && after_space) {
      in_comment = true;
      continue;
    }
    after_space = c == ' ' || c == '\t';
    out.push_back(c);
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(std::string_view text, std::string_view source_name, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in{strip_inline_comments(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::ConfigError, std::string(source_name) + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig config;
  for (const auto& [name, section] : tree) {
    if (section.empty()) {
      fail(ErrorKind::ConfigError, std::string(source_name) + ": key '" + name + "' outside any section");
    }
    const Reader r(source_name, name);
    if (name == "run") read_run(section, r, base_dir, config);
    else if (name == "dataset") read_dataset(section, r, base_dir, config.dataset);
    else if (name == "train") read_train(section, r, config.train);
    else if (name == "augmentation") read_augment(section, r, config);
    else if (name == "sweep") read_sweep(section, r, config.sweep);
    else fail(ErrorKind::ConfigError, std::string(source_name) + ": unknown section [" + name + "]");
  }
  config.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorKind::ConfigError, "no such config file: " + path.string());
  return parse_run_config(read_file(path), path.string(), path.parent_path());
}

std::string dump_run_config(const RunConfig& c) {
  const auto& d = c.dataset;
  const auto& s = d.synthetic;
  const auto& t = c.train;
  auto real = [](double v) { return format_real(v); };
  auto count = [](std::size_t v) { return std::to_string(v); };
  auto variant = [](Variant v) { return std::string(to_string(v)); };

  std::ostringstream out;
  out << "[run]\nseed = " << c.seed << "\nout = " << c.out_dir.string() << "\n\n";
  out << "[dataset]\n";
  const char* csv_keys[] = {"normal_csv", "inner_csv", "outer_csv", "ball_csv"};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!d.csv_paths[i].empty()) out << csv_keys[i] << " = " << d.csv_paths[i].string() << "\n";
  }
  out << "window_len = " << d.window_len << "\nwindow_stride = " << d.window_stride
      << "\nimage_size = " << d.image_size << "\ntest_fraction = " << real(d.test_fraction)
      << "\nwindows_normal = " << d.windows_per_class[0] << "\nwindows_inner = " << d.windows_per_class[1]
      << "\nwindows_outer = " << d.windows_per_class[2] << "\nwindows_ball = " << d.windows_per_class[3]
      << "\nshaft_freq = " << real(s.shaft_freq) << "\nshaft_amplitude = " << real(s.shaft_amplitude)
      << "\nfault_freq = " << real(s.fault_freq) << "\ninner_multiplier = " << real(s.inner_multiplier)
      << "\nouter_multiplier = " << real(s.outer_multiplier) << "\nball_multiplier = " << real(s.ball_multiplier)
      << "\nimpulse_decay = " << real(s.impulse_decay) << "\nimpulse_amplitude = " << real(s.impulse_amplitude)
      << "\nnoise_floor = " << real(s.base_noise_epsilon) << "\nsample_rate = " << real(s.sample_rate)
      << "\nduration = " << real(s.duration) << "\n\n";
  out << "[train]\nbatch_size = " << t.batch_size << "\ninitial_lr = " << real(t.initial_lr)
      << "\nlr_decay = " << real(t.lr_decay) << "\ndecay_every = " << t.decay_every << "\nepochs = " << t.epochs
      << "\nloss_mode = " << to_string(t.loss_mode) << "\nchannel_scale = " << real(t.channel_scale)
      << "\nflip_probability = " << real(t.flip_probability) << "\n\n";
  out << "[augmentation]\nepsilons = " << join(t.augment_epsilons, real)
      << "\nschedule_steps = " << c.augment.schedule_steps << "\nbeta_start = " << real(c.augment.beta_start)
      << "\nbeta_end = " << real(c.augment.beta_end) << "\ndiffusion_steps = " << join(c.augment.diffusion_steps, count)
      << "\nperturb_fractions = " << join(c.augment.perturb_fractions, real) << "\n\n";
  out << "[sweep]\nseries_levels = " << join(c.sweep.levels.series, real)
      << "\nimage_levels = " << join(c.sweep.levels.image, real)
      << "\nboth_levels = " << join(c.sweep.levels.both, real)
      << "\nimage_noise = " << to_string(c.sweep.levels.image_noise)
      << "\nprune_rates = " << join(c.sweep.prune_rates, real);
  if (c.sweep.finetune_epochs) out << "\nfinetune_epochs = " << *c.sweep.finetune_epochs;
  out << "\nvariants = " << join(c.sweep.variants, variant)
      << "\nnormalized_selector = " << (c.sweep.normalized_selector ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace gfd::cli

#include "commands.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include "gfd/augmentation.hpp"
#include "gfd/checkpoint.hpp"
#include "gfd/csv.hpp"
#include "gfd/dataset.hpp"
#include "gfd/error.hpp"
#include "gfd/evaluation.hpp"
#include "gfd/io.hpp"
#include "gfd/pruning.hpp"
#include "gfd/rng.hpp"
#include "gfd/series_transform.hpp"
#include "gfd/spectral.hpp"
#include "gfd/training.hpp"
#include "run_config.hpp"

namespace gfd::cli {
namespace {

namespace fs = std::filesystem;

// Sub-seeds derived from the master seed; train and evaluate must agree.
constexpr std::uint64_t kDatasetStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kSweepStream = 3;
constexpr std::uint64_t kSpectrumStream = 4;
constexpr std::uint64_t kAugmentStream = 5;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App& sub, Common& c) {
  sub.add_option("--config", c.config, "Run configuration file");
  sub.add_option("--seed", c.seed, "Master seed (overrides the config)");
  sub.add_option("--out", c.out, "Output directory (overrides the config)");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  if (c.config.empty()) cfg.validate();
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.out_dir = c.out;
  cfg.train.seed = mix_seed(cfg.seed, kTrainStream);
  return cfg;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Collects artifacts of one invocation and writes its manifest last.
class Run {
 public:
  Run(std::string command, RunConfig config) : command_(std::move(command)), config_(std::move(config)) {
    fs::create_directories(config_.out_dir);
  }

  const RunConfig& config() const noexcept { return config_; }
  const fs::path& out() const noexcept { return config_.out_dir; }

  void write(const std::string& name, std::string_view bytes) {
    const fs::path target = config_.out_dir / name;
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    write_file_atomic(target, bytes);
    checksums_[name] = hex64(fnv1a64(bytes));
  }

  void finish() {
    nlohmann::ordered_json m;
    m["command"] = command_;
    m["config_hash"] = hex64(fnv1a64(dump_run_config(config_)));
    m["seed"] = config_.seed;
    m["timestamp"] = utc_timestamp();
    auto& art = m["artifacts"];
    art = nlohmann::ordered_json::object();
    for (const auto& [name, sum] : checksums_) art[name] = sum;
    write_file_atomic(config_.out_dir / (command_ + ".manifest.json"), m.dump(2) + "\n");
  }

 private:
  std::string command_;
  RunConfig config_;
  std::map<std::string, std::string> checksums_;
};

/// Renders a CSV table as aligned text.
std::string aligned(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(cells));
  }
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out += r[i];
      if (i + 1 < r.size()) out.append(width[i] - r[i].size() + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

Dataset dataset_for(const RunConfig& cfg) { return build_dataset(cfg.dataset, mix_seed(cfg.seed, kDatasetStream)); }

fs::path checkpoint_path(const RunConfig& cfg, const std::string& flag) {
  const fs::path p = flag.empty() ? cfg.out_dir / "checkpoint.gfd" : fs::path(flag);
  if (!fs::exists(p)) fail(ErrorKind::ConfigError, "no checkpoint at " + p.string() + "; run 'gfd train' first");
  return p;
}

LossMode mode_of(const FusionModel& model) {
  return model.config().num_outputs == 1 ? LossMode::BinarySigmoid : LossMode::MulticlassSoftmax;
}

void check_model_fits(const FusionModel& model, const Dataset& ds) {
  const auto& mc = model.config();
  if (mc.image_size != ds.test.front().image.size() || mc.series_length != ds.test.front().window.values.size()) {
    fail(ErrorKind::ConfigError, "checkpoint input sizes do not match the dataset configuration");
  }
}

// ------------------------------------------------------------- commands

struct TransformArgs {
  Common common;
  std::string input;
  std::size_t size = 64;
  std::size_t window_len = 0;
  std::size_t stride = 0;
};

int cmd_transform(const TransformArgs& a) {
  RunConfig cfg = resolve(a.common);
  if (a.size == 0 || a.size % 32 != 0) fail(ErrorKind::ConfigError, "--size must be a positive multiple of 32");
  if (!fs::exists(a.input)) fail(ErrorKind::ConfigError, "no such file: " + a.input);
  const RawSeries series = load_csv(a.input);
  const std::size_t len = a.window_len ? a.window_len : a.size;
  if (len < a.size) fail(ErrorKind::ConfigError, "--window-len must be at least --size");
  const std::size_t stride = a.stride ? a.stride : len;
  const auto windows = window_series(series.values, len, stride, ClassLabel::Normal, fs::path(a.input).stem().string());

  Run run("transform", cfg);
  for (const auto& w : windows) {
    const auto name = image_filename(w);
    const auto stem = name.substr(0, name.size() - 4);
    run.write(name, encode_pgm(series_to_image(w.values, a.size)));
    const auto scaled = minmax_scale(stride_subsample(w.values, a.size));
    run.write(stem + ".gaf.csv", encode_gaf_csv(gaf_matrix(scaled)));
  }
  run.finish();
  fmt::print("wrote {} images\n", windows.size());
  return 0;
}

int cmd_synth(const Common& c) {
  Run run("synth", resolve(c));
  const Dataset ds = dataset_for(run.config());
  for (const auto* split : {&ds.train, &ds.test}) {
    for (const auto& s : *split) run.write("images/" + image_filename(s.window), encode_pgm(s.image));
  }
  run.write("dataset.csv", encode_manifest(ds));
  run.finish();
  fmt::print("wrote {} train and {} test samples\n", ds.train.size(), ds.test.size());
  return 0;
}

int cmd_augment(const Common& c) {
  Run run("augment", resolve(c));
  const auto& cfg = run.config();
  const Dataset ds = dataset_for(cfg);
  const std::size_t n = cfg.dataset.image_size;
  const std::uint64_t seed = mix_seed(cfg.seed, kAugmentStream);
  const auto schedule = make_schedule(cfg.augment.schedule_steps, cfg.augment.beta_start, cfg.augment.beta_end);

  auto pixel_change = [](const GrayImage& a, const GrayImage& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.pixels().size(); ++i) sum += std::abs(double(a.pixels()[i]) - double(b.pixels()[i]));
    return sum / (255.0 * static_cast<double>(a.pixels().size()));
  };

  // measured: realized noise fraction for series noise, mean absolute
  // pixel change (in [0, 1]) for the image kinds.
  CsvWriter csv({"kind", "level", "snr_db", "measured"});
  const auto& first = ds.train.front();
  for (std::size_t li = 0; li < cfg.train.augment_epsilons.size(); ++li) {
    const double eps = cfg.train.augment_epsilons[li];
    double realized = 0.0;
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
      const auto& v = ds.train[i].window.values;
      const auto noisy = add_series_noise(v, eps, mix_seed(mix_seed(seed, li), i));
      std::vector<double> diff(v.size());
      for (std::size_t k = 0; k < v.size(); ++k) diff[k] = noisy[k] - v[k];
      realized += rms(diff) / rms(v);
      if (i == 0) run.write("augment/series_" + format_real(eps) + ".pgm", encode_pgm(series_to_image(noisy, n)));
    }
    csv.row("series", eps, epsilon_to_snr(eps), realized / static_cast<double>(ds.train.size()));
  }
  for (std::size_t li = 0; li < cfg.augment.diffusion_steps.size(); ++li) {
    const std::size_t t = cfg.augment.diffusion_steps[li];
    double change = 0.0;
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
      const auto img = diffuse_image(ds.train[i].image, t, schedule, mix_seed(mix_seed(seed, 100 + li), i));
      change += pixel_change(img, ds.train[i].image);
      if (i == 0) run.write("augment/diffusion_" + std::to_string(t) + ".pgm", encode_pgm(img));
    }
    csv.row("diffusion", t, std::string_view{}, change / static_cast<double>(ds.train.size()));
  }
  const std::pair<const char*, GrayImage (*)(const GrayImage&, double, std::uint64_t)> replacers[] = {
      {"perturb", &perturb_image}, {"salt_pepper", &salt_pepper_image}};
  for (std::size_t m = 0; m < 2; ++m) {
    const auto [name, apply] = replacers[m];
    for (std::size_t li = 0; li < cfg.augment.perturb_fractions.size(); ++li) {
      const double f = cfg.augment.perturb_fractions[li];
      double change = 0.0;
      for (std::size_t i = 0; i < ds.train.size(); ++i) {
        const auto img = apply(ds.train[i].image, f, mix_seed(mix_seed(seed, 200 + 100 * m + li), i));
        change += pixel_change(img, ds.train[i].image);
        if (i == 0) run.write("augment/" + std::string(name) + "_" + format_real(f) + ".pgm", encode_pgm(img));
      }
      csv.row(std::string_view(name), f, std::string_view{}, change / static_cast<double>(ds.train.size()));
    }
  }
  run.write("augment/original.pgm", encode_pgm(first.image));
  run.write("augment.csv", csv.str());
  run.finish();
  fmt::print("{}", aligned(csv.str()));
  return 0;
}

int cmd_train(const Common& c) {
  Run run("train", resolve(c));
  const auto& cfg = run.config();
  const Dataset ds = dataset_for(cfg);
  FusionModel model = make_model(cfg.dataset.window_len, cfg.dataset.image_size, cfg.train);
  const History history = train(model, ds.train, cfg.train);
  const auto labels = targets_of(ds.test, cfg.train.loss_mode);
  const double acc = accuracy(predict(model, ds.test, cfg.train.loss_mode), labels);
  run.write("history.csv", encode_history_csv(history));
  run.write("checkpoint.gfd", encode_checkpoint(model));
  run.finish();
  fmt::print("{}", aligned(encode_history_csv(history)));
  fmt::print("test accuracy {}%\n", format_real(acc));
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& ckpt) {
  Run run("evaluate", resolve(c));
  const auto& cfg = run.config();
  const FusionModel model = load_checkpoint(checkpoint_path(cfg, ckpt));
  const Dataset ds = dataset_for(cfg);
  check_model_fits(model, ds);
  const LossMode mode = mode_of(model);
  CsvWriter csv({"split", "samples", "accuracy"});
  for (const auto& [name, set] : {std::pair{"train", &ds.train}, std::pair{"test", &ds.test}}) {
    const auto labels = targets_of(*set, mode);
    csv.row(std::string_view(name), set->size(), accuracy(predict(model, *set, mode), labels));
  }
  run.write("metrics.csv", csv.str());
  run.finish();
  fmt::print("{}", aligned(csv.str()));
  return 0;
}

int cmd_sweep(const Common& c, const std::string& ckpt) {
  Run run("sweep", resolve(c));
  const auto& cfg = run.config();
  const FusionModel model = load_checkpoint(checkpoint_path(cfg, ckpt));
  const Dataset ds = dataset_for(cfg);
  check_model_fits(model, ds);
  const auto sweep = robustness_sweep(model, ds.test, cfg.sweep.levels, mode_of(model), mix_seed(cfg.seed, kSweepStream));
  CsvWriter ap({"kind", "ap"});
  for (auto kind : {NoiseKind::Series, NoiseKind::Image, NoiseKind::Both}) {
    const auto n = std::count_if(sweep.rows.begin(), sweep.rows.end(), [&](const SweepRow& r) { return r.kind == kind; });
    if (n >= 2) ap.row(to_string(kind), ap_from_sweep(sweep, kind));
  }
  run.write("sweep.csv", encode_sweep_csv(sweep));
  run.write("ap.csv", ap.str());
  run.finish();
  fmt::print("image noise: {}\n{}\n{}", to_string(cfg.sweep.levels.image_noise), aligned(encode_sweep_csv(sweep)),
             aligned(ap.str()));
  return 0;
}

std::vector<std::pair<double, double>> read_selection_csv(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorKind::ConfigError, "no such file: " + path.string());
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::EmptyFile, path.string() + " is empty");
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) header.push_back(cell);
  }
  auto column = [&](std::initializer_list<std::string_view> names) -> std::size_t {
    for (auto n : names) {
      const auto it = std::find(header.begin(), header.end(), n);
      if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
    }
    fail(ErrorKind::ParseError, path.string() + ":1: missing column " + std::string(*names.begin()));
  };
  const std::size_t rate_col = column({"rate_percent", "rate"});
  const std::size_t acc_col = column({"acc_post", "accuracy"});
  std::vector<std::pair<double, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream r(line);
    std::string cell;
    while (std::getline(r, cell, ',')) cells.push_back(cell);
    auto num = [&](std::size_t col) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cells.at(col), &used);
        if (used != cells[col].size()) throw std::invalid_argument("trailing");
        return v;
      } catch (const std::exception&) {
        fail(ErrorKind::ParseError, path.string() + ":" + std::to_string(line_no) + ": bad numeric field");
      }
    };
    rows.emplace_back(num(rate_col), num(acc_col));
  }
  return rows;
}

int cmd_prune(const Common& c, const std::string& ckpt, const std::string& select_from) {
  Run run("prune", resolve(c));
  const auto& cfg = run.config();
  const bool normalized = cfg.sweep.normalized_selector;
  if (!select_from.empty()) {
    const auto rows = read_selection_csv(select_from);
    const double best = select_optimal(std::span<const std::pair<double, double>>(rows), normalized);
    CsvWriter csv({"optimal_rate_percent"});
    csv.row(best);
    run.write("optimal_rate.csv", csv.str());
    run.finish();
    fmt::print("optimal pruning rate {}%\n", format_real(best));
    return 0;
  }
  const FusionModel model = load_checkpoint(checkpoint_path(cfg, ckpt));
  const Dataset ds = dataset_for(cfg);
  check_model_fits(model, ds);
  std::vector<double> rates;
  for (double r : cfg.sweep.prune_rates) rates.push_back(r / 100.0);
  TrainConfig tc = cfg.train;
  tc.loss_mode = mode_of(model);
  std::vector<FusionModel> pruned;
  const auto report = prune_sweep(model, ds.train, ds.test, rates, cfg.sweep.finetune_epochs.value_or(tc.epochs), tc, &pruned);
  const double best = select_optimal(report, normalized);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    if (report.rows[i].rate_percent == best) run.write("pruned.gfd", encode_checkpoint(pruned[i]));
  }
  run.write("prune_report.csv", encode_prune_report(report));
  run.finish();
  fmt::print("{}", aligned(encode_prune_report(report)));
  fmt::print("optimal pruning rate {}%\n", format_real(best));
  return 0;
}

int cmd_ablate(const Common& c) {
  Run run("ablate", resolve(c));
  const auto& cfg = run.config();
  const Dataset ds = dataset_for(cfg);
  const auto table = ablation_run(ds, cfg.sweep.variants, cfg.train, cfg.sweep.levels);
  run.write("ablation.csv", encode_ablation_csv(table));
  run.finish();
  fmt::print("{}", aligned(encode_ablation_csv(table)));
  return 0;
}

int cmd_spectrum(const Common& c, const std::string& label_name, std::size_t samples, std::size_t trials) {
  Run run("spectrum", resolve(c));
  const auto& cfg = run.config();
  const auto label = parse_label(label_name);
  if (!label || *label == ClassLabel::Normal) fail(ErrorKind::ConfigError, "--label must be inner, outer or ball");
  const std::uint64_t seed = mix_seed(cfg.seed, kSpectrumStream);
  const auto& spec = cfg.dataset.synthetic;
  const auto fault = synthesize_signal(spec, *label, samples, seed);
  const auto normal = synthesize_signal(spec, ClassLabel::Normal, samples, seed);
  run.write("spectrum.csv", encode_spectrum_csv(diff_spectrum(fault, normal)));

  CsvWriter env({"bin_index", "frequency_hz", "magnitude"});
  const auto es = envelope_spectrum(fault);
  for (std::size_t k = 0; k <= samples / 2; ++k) {
    env.row(k, static_cast<double>(k) * spec.sample_rate / static_cast<double>(samples), es[k]);
  }
  run.write("envelope_spectrum.csv", env.str());

  CsvWriter noise({"input", "n", "trials", "empirical_std", "theory_std", "relative_error"});
  for (bool complex_input : {true, false}) {
    const auto check = verify_noise_spectrum(64, 1.0, trials, mix_seed(seed, complex_input ? 1 : 2), complex_input);
    noise.row(std::string_view(complex_input ? "complex" : "real"), std::size_t{64}, trials, check.empirical_std,
              check.theory_std, check.relative_error);
  }
  run.write("noise_spectrum.csv", noise.str());
  run.finish();
  fmt::print("defect frequency {} Hz\n{}", format_real(spec.defect_frequency(*label)), aligned(noise.str()));
  return 0;
}

int cmd_kl(const Common& c, const std::string& ckpt) {
  Run run("kl", resolve(c));
  const auto& cfg = run.config();
  const FusionModel model = load_checkpoint(checkpoint_path(cfg, ckpt));
  const Dataset ds = dataset_for(cfg);
  check_model_fits(model, ds);
  double lo = 0.0, hi = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < ds.test.size(); ++i) {
    const double d = branch_kl(model, ds.test[i]);
    lo = i == 0 ? d : std::min(lo, d);
    hi = i == 0 ? d : std::max(hi, d);
    sum += d;
  }
  const double mean = sum / static_cast<double>(ds.test.size());
  std::string text = "samples " + std::to_string(ds.test.size()) + "\nmean_kl " + format_real(mean) + "\nmin_kl " +
                     format_real(lo) + "\nmax_kl " + format_real(hi) + "\n";
  run.write("kl.txt", text);
  run.finish();
  fmt::print("{}", text);
  return 0;
}

bool is_input_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConstantSeries:
    case ErrorKind::TooShort:
    case ErrorKind::EmptySeries:
    case ErrorKind::ParseError:
    case ErrorKind::EmptyFile:
    case ErrorKind::ConfigError:
    case ErrorKind::FormatError:
    case ErrorKind::ClassTooSmall:
    case ErrorKind::InsufficientDuration:
    case ErrorKind::RateOutOfRange:
      return true;
    default:
      return false;
  }
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Gramian-angular-field fault diagnosis toolkit"};
  app.require_subcommand(1);

  TransformArgs transform;
  auto* t = app.add_subcommand("transform", "Convert a CSV series into GAF images");
  add_common(*t, transform.common);
  t->add_option("--input", transform.input, "CSV file, one value per line")->required();
  t->add_option("--size", transform.size, "Image side N");
  t->add_option("--window-len", transform.window_len, "Window length (default N)");
  t->add_option("--stride", transform.stride, "Window stride (default window length)");

  Common synth, augment, train_c, eval_c, sweep_c, prune_c, ablate_c, spectrum_c, kl_c;
  std::string eval_ckpt, sweep_ckpt, prune_ckpt, kl_ckpt, select_from, label = "inner";
  std::size_t samples = 4096, trials = 10000;

  add_common(*app.add_subcommand("synth", "Generate the synthetic dataset"), synth);
  add_common(*app.add_subcommand("augment", "Apply series and image augmentation"), augment);
  add_common(*app.add_subcommand("train", "Train a model"), train_c);
  auto* e = app.add_subcommand("evaluate", "Accuracy of a trained model");
  add_common(*e, eval_c);
  e->add_option("--checkpoint", eval_ckpt, "Model checkpoint (default <out>/checkpoint.gfd)");
  auto* s = app.add_subcommand("sweep", "Noise robustness sweep");
  add_common(*s, sweep_c);
  s->add_option("--checkpoint", sweep_ckpt, "Model checkpoint (default <out>/checkpoint.gfd)");
  auto* p = app.add_subcommand("prune", "Pruning sweep and optimal rate selection");
  add_common(*p, prune_c);
  p->add_option("--checkpoint", prune_ckpt, "Model checkpoint (default <out>/checkpoint.gfd)");
  p->add_option("--select-from", select_from, "Only select the optimal rate from a rate/accuracy CSV");
  add_common(*app.add_subcommand("ablate", "Train and sweep every configured variant"), ablate_c);
  auto* sp = app.add_subcommand("spectrum", "Fault-minus-normal spectrum and noise spectrum check");
  add_common(*sp, spectrum_c);
  sp->add_option("--label", label, "Fault class: inner, outer or ball");
  sp->add_option("--samples", samples, "Signal length");
  sp->add_option("--trials", trials, "Monte Carlo trials for the noise check");
  auto* k = app.add_subcommand("kl", "Divergence between branch feature distributions");
  add_common(*k, kl_c);
  k->add_option("--checkpoint", kl_ckpt, "Model checkpoint (default <out>/checkpoint.gfd)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    fmt::print(stderr, "error[usage]: {}\n", one_line(ex.what()));
    return 2;
  }

  try {
    if (app.got_subcommand("transform")) return cmd_transform(transform);
    if (app.got_subcommand("synth")) return cmd_synth(synth);
    if (app.got_subcommand("augment")) return cmd_augment(augment);
    if (app.got_subcommand("train")) return cmd_train(train_c);
    if (app.got_subcommand("evaluate")) return cmd_evaluate(eval_c, eval_ckpt);
    if (app.got_subcommand("sweep")) return cmd_sweep(sweep_c, sweep_ckpt);
    if (app.got_subcommand("prune")) return cmd_prune(prune_c, prune_ckpt, select_from);
    if (app.got_subcommand("ablate")) return cmd_ablate(ablate_c);
    if (app.got_subcommand("spectrum")) return cmd_spectrum(spectrum_c, label, samples, trials);
    if (app.got_subcommand("kl")) return cmd_kl(kl_c, kl_ckpt);
  } catch (const Error& ex) {
    fmt::print(stderr, "error[{}]: {}\n", to_string(ex.kind()), one_line(ex.what()));
    return is_input_error(ex.kind()) ? 2 : 1;
  } catch (const std::exception& ex) {
    fmt::print(stderr, "error[runtime]: {}\n", one_line(ex.what()));
    return 1;
  }
  return 1;
}

}  // namespace gfd::cli

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "gfd/error.hpp"
#include "run_config.hpp"

namespace gfd::cli {
namespace {

RunConfig parse(std::string_view text) { return parse_run_config(text, "test.ini", "."); }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::IoError;
}

TEST(RunConfig, EmptyTextGivesDefaults) {
  const auto c = parse("");
  EXPECT_EQ(c.dataset.image_size, 64u);
  EXPECT_EQ(c.train.batch_size, 32u);
  EXPECT_DOUBLE_EQ(c.train.initial_lr, 1e-4);
  EXPECT_EQ(c.sweep.prune_rates, (std::vector<double>{0, 10, 20, 50, 90}));
  EXPECT_EQ(c.seed, 0u);
  EXPECT_NO_THROW(c.validate());
}

TEST(RunConfig, ReadsEverySection) {
  const auto c = parse(
      "# comment\n"
      "[run]\nseed = 7\nout = results\n"
      "[dataset]\nimage_size = 32\nwindow_len = 32\nwindow_stride = 16\nwindows_normal = 10\nshaft_freq = 30\n"
      "[train]\nbatch_size = 4\nepochs = 2\nloss_mode = multiclass_softmax\nchannel_scale = 0.5\n"
      "[augmentation]\nepsilons = 0.1, 0.3\ndiffusion_steps = 1,5\n"
      "[sweep]\nseries_levels = 0, 0.2\nimage_noise = gaussian\nimage_levels = 0, 2.0\nprune_rates = 0,40\n"
      "variants = whole, no_series_branch\nfinetune_epochs = 3\nnormalized_selector = true\n");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.out_dir, std::filesystem::path(".") / "results");
  EXPECT_EQ(c.dataset.image_size, 32u);
  EXPECT_EQ(c.dataset.window_stride, 16u);
  EXPECT_EQ(c.dataset.windows_per_class[0], 10u);
  EXPECT_DOUBLE_EQ(c.dataset.synthetic.shaft_freq, 30.0);
  EXPECT_EQ(c.train.batch_size, 4u);
  EXPECT_EQ(c.train.loss_mode, LossMode::MulticlassSoftmax);
  EXPECT_EQ(c.train.augment_epsilons, (std::vector<double>{0.1, 0.3}));
  EXPECT_EQ(c.augment.diffusion_steps, (std::vector<std::size_t>{1, 5}));
  EXPECT_EQ(c.sweep.levels.series, (std::vector<double>{0, 0.2}));
  EXPECT_EQ(c.sweep.levels.image_noise, ImageNoise::Gaussian);
  EXPECT_EQ(c.sweep.variants.size(), 2u);
  EXPECT_EQ(c.sweep.finetune_epochs, 3u);
  EXPECT_TRUE(c.sweep.normalized_selector);
}

TEST(RunConfig, InlineComments) {
  const auto c = parse("# header\n[train]\nepochs = 4   # short run\nbatch_size = 8 ; small\n");
  EXPECT_EQ(c.train.epochs, 4u);
  EXPECT_EQ(c.train.batch_size, 8u);
}

TEST(RunConfig, RejectsUnknownNames) {
  EXPECT_EQ(kind_of([] { parse("[dataset]\nimage_sise = 64\n"); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { parse("[model]\nwidth = 3\n"); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { parse("[train]\nbatch_size = many\n"); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { parse("[sweep]\nvariants = whole, most\n"); }), ErrorKind::ConfigError);
}

TEST(RunConfig, ValidatesRanges) {
  EXPECT_EQ(kind_of([] { parse("[dataset]\nimage_size = 48\nwindow_len = 64\n").validate(); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { parse("[dataset]\nimage_size = 64\nwindow_len = 32\n").validate(); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { parse("[sweep]\nprune_rates = 0, 100\n").validate(); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { parse("[sweep]\nimage_levels = 0, 1.5\n").validate(); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { parse("[augmentation]\ndiffusion_steps = 0\n").validate(); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { parse("[dataset]\nnormal_csv = /no/such/file.csv\n").validate(); }), ErrorKind::ConfigError);
}

TEST(RunConfig, RelativeCsvPathsResolveAgainstConfigDir) {
  const auto dir = std::filesystem::temp_directory_path() / "gfd_run_config_test";
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "run.ini";
  for (const char* name : {"n.csv", "i.csv", "o.csv", "b.csv"}) std::ofstream(dir / name) << "1\n2\n";
  {
    std::ofstream f(cfg);
    f << "[dataset]\nnormal_csv = n.csv\ninner_csv = i.csv\nouter_csv = o.csv\nball_csv = b.csv\n";
  }
  const auto c = load_run_config(cfg);
  EXPECT_EQ(c.dataset.csv_paths[0], dir / "n.csv");
  EXPECT_TRUE(c.dataset.uses_csv());
  EXPECT_EQ(kind_of([&] { load_run_config(dir / "missing.ini"); }), ErrorKind::ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(RunConfig, DumpIsCanonical) {
  const auto a = parse("[train]\nepochs = 3\n[run]\nseed = 2\nout = /tmp/x\n");
  const auto b = parse("[run]\nout=/tmp/x\nseed=2\n[train]\nepochs=3\n");
  EXPECT_EQ(dump_run_config(a), dump_run_config(b));
  EXPECT_NE(dump_run_config(a), dump_run_config(parse("")));
  EXPECT_EQ(dump_run_config(parse(dump_run_config(a))), dump_run_config(a));
}

}  // namespace
}  // namespace gfd::cli

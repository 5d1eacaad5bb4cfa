#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gfd/dataset.hpp"
#include "gfd/evaluation.hpp"
#include "gfd/fusion_model.hpp"
#include "gfd/training.hpp"

namespace gfd::cli {

struct AugmentSettings {
  std::size_t schedule_steps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  std::vector<std::size_t> diffusion_steps{1, 10, 100, 250};  // at most T/4 keeps images informative
  std::vector<double> perturb_fractions{0.05, 0.1, 0.2, 0.5};
};

struct SweepSettings {
  SweepLevels levels;
  std::vector<double> prune_rates{0, 10, 20, 50, 90};  // percent
  std::optional<std::size_t> finetune_epochs;         // defaults to train epochs
  std::vector<Variant> variants{Variant::Whole, Variant::NoSeriesBranch, Variant::NoGlobalHead,
                                Variant::NoTransformerHead, Variant::TrunkOnly};
  bool normalized_selector = false;
};

/// Everything a subcommand needs. Every field has a default, so an empty
/// file is a valid configuration.
struct RunConfig {
  DatasetConfig dataset;
  TrainConfig train;
  AugmentSettings augment;
  SweepSettings sweep;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;

  void validate() const;
};

/// Parses the bracketed-section key = value format. Relative CSV paths are
/// resolved against `base_dir`. Unknown sections or keys are errors.
RunConfig parse_run_config(std::string_view text, std::string_view source_name,
                           const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical text form of every effective setting; hashing it identifies a run.
std::string dump_run_config(const RunConfig& config);

}  // namespace gfd::cli

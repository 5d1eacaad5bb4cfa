#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gfd/dataset.hpp"
#include "gfd/fusion_model.hpp"
#include "gfd/training.hpp"

namespace gfd {

/// One prunable batch-norm channel.
struct ChannelRef {
  std::size_t unit = 0;     // index into FusionModel::bn_units()
  std::size_t channel = 0;
  double magnitude = 0.0;   // |gamma|
};

/// All prunable channels sorted ascending by |gamma|; ties by (unit, channel).
std::vector<ChannelRef> rank_channels(FusionModel& model);

struct UnitPlan {
  std::string name;
  bool removable = false;        // false: channel-select masking only
  std::vector<bool> drop;        // per channel
};

struct PrunePlan {
  double global_rate = 0.0;
  std::size_t total_channels = 0;
  std::size_t dropped = 0;
  std::vector<UnitPlan> units;

  double achieved_rate() const {
    return total_channels == 0 ? 0.0 : static_cast<double>(dropped) / static_cast<double>(total_channels);
  }
};

/// Marks the weakest round(rate * total) channels. Channels whose removal
/// would break residual wiring are masked instead of removed. A unit never
/// loses its last channel; the deficit is taken from the next-ranked
/// channels elsewhere.
PrunePlan make_plan(FusionModel& model, double rate);

/// Removes removable channels and masks the rest.
FusionModel apply_plan(const FusionModel& model, const PrunePlan& plan);

/// Reference model: every dropped channel masked, nothing removed.
FusionModel mask_only(const FusionModel& model, const PrunePlan& plan);

struct PruneRow {
  double rate_percent = 0.0;
  double acc_pre = 0.0;   // percent, before fine-tuning
  double acc_post = 0.0;  // percent, after fine-tuning
  std::size_t param_count = 0;
};

struct PruneReport {
  std::vector<PruneRow> rows;
};

/// For each rate (fractions, strictly increasing): plan, apply, evaluate,
/// fine-tune at initial_lr * 0.1, evaluate. `pruned_models`, when given,
/// receives the fine-tuned model of each row.
PruneReport prune_sweep(const FusionModel& trained, std::span<const PairedSample> train_set,
                        std::span<const PairedSample> test_set, std::span<const double> rates,
                        std::size_t finetune_epochs, const TrainConfig& config,
                        std::vector<FusionModel>* pruned_models = nullptr);

/// Rate (percent) maximizing sqrt(ACC^2 + Rate^2) over post-fine-tune
/// accuracy, both in percent; ties go to the larger rate. With
/// `normalized`, both axes are taken as fractions in [0, 1].
double select_optimal(const PruneReport& report, bool normalized = false);

/// Same criterion over explicit (rate %, accuracy %) pairs.
double select_optimal(std::span<const std::pair<double, double>> rate_accuracy, bool normalized = false);

/// CSV: rate_percent,acc_pre,acc_post,param_count.
std::string encode_prune_report(const PruneReport& report);

}  // namespace gfd

#include "gfd/pruning.hpp"

#include <algorithm>
#include <cmath>

#include "gfd/csv.hpp"
#include "gfd/error.hpp"
#include "gfd/evaluation.hpp"

namespace gfd {

std::vector<ChannelRef> rank_channels(FusionModel& model) {
  const auto units = model.bn_units();
  if (units.empty()) fail(ErrorKind::NoBatchNorm, "model has no batch-norm layers to rank");
  std::vector<ChannelRef> out;
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& gamma = units[u].bn->gamma.value;
    for (std::size_t c = 0; c < gamma.size(); ++c) out.push_back({u, c, std::abs(gamma[c])});
  }
  std::stable_sort(out.begin(), out.end(), [](const ChannelRef& a, const ChannelRef& b) {
    if (a.magnitude != b.magnitude) return a.magnitude < b.magnitude;
    if (a.unit != b.unit) return a.unit < b.unit;
    return a.channel < b.channel;
  });
  return out;
}

PrunePlan make_plan(FusionModel& model, double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) fail(ErrorKind::RateOutOfRange, "pruning rate must lie in [0, 1)");
  const auto ranked = rank_channels(model);
  const auto units = model.bn_units();

  PrunePlan plan;
  plan.global_rate = rate;
  plan.total_channels = ranked.size();
  std::vector<std::size_t> kept;
  for (const auto& u : units) {
    plan.units.push_back({u.name, u.removable, std::vector<bool>(u.bn->channels(), false)});
    kept.push_back(u.bn->channels());
  }
  const auto target = static_cast<std::size_t>(std::round(rate * static_cast<double>(ranked.size())));
  for (const auto& ch : ranked) {
    if (plan.dropped == target) break;
    // Ascending order means the last survivor of a unit is its strongest.
    if (kept[ch.unit] == 1) continue;
    plan.units[ch.unit].drop[ch.channel] = true;
    --kept[ch.unit];
    ++plan.dropped;
  }
  return plan;
}

namespace {

void check_plan(FusionModel& model, const PrunePlan& plan) {
  const auto units = model.bn_units();
  if (units.size() != plan.units.size()) fail(ErrorKind::PlanModelMismatch, "plan unit count differs from model");
  for (std::size_t u = 0; u < units.size(); ++u) {
    if (units[u].name != plan.units[u].name || units[u].bn->channels() != plan.units[u].drop.size() ||
        units[u].removable != plan.units[u].removable) {
      fail(ErrorKind::PlanModelMismatch, "plan does not match unit " + units[u].name);
    }
    if (std::all_of(plan.units[u].drop.begin(), plan.units[u].drop.end(), [](bool d) { return d; })) {
      fail(ErrorKind::PlanModelMismatch, "plan drops every channel of " + units[u].name);
    }
  }
}

}  // namespace

FusionModel mask_only(const FusionModel& model, const PrunePlan& plan) {
  FusionModel out = model;
  check_plan(out, plan);
  auto units = out.bn_units();
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (std::size_t c = 0; c < plan.units[u].drop.size(); ++c) {
      if (plan.units[u].drop[c]) units[u].select->mask[c] = 0.0;
    }
  }
  return out;
}

FusionModel apply_plan(const FusionModel& model, const PrunePlan& plan) {
  FusionModel out = model;
  check_plan(out, plan);
  // Masks first: keep_mid_channels invalidates unit pointers' sizes but not
  // their identity, and it only touches removable units.
  auto units = out.bn_units();
  for (std::size_t u = 0; u < units.size(); ++u) {
    if (plan.units[u].removable) continue;
    for (std::size_t c = 0; c < plan.units[u].drop.size(); ++c) {
      if (plan.units[u].drop[c]) units[u].select->mask[c] = 0.0;
    }
  }
  for (std::size_t u = 0; u < units.size(); ++u) {
    if (!plan.units[u].removable) continue;
    const auto& drop = plan.units[u].drop;
    if (std::none_of(drop.begin(), drop.end(), [](bool d) { return d; })) continue;
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < drop.size(); ++c) {
      if (!drop[c]) keep.push_back(c);
    }
    out.keep_mid_channels(units[u].block, keep);
  }
  return out;
}

PruneReport prune_sweep(const FusionModel& trained, std::span<const PairedSample> train_set,
                        std::span<const PairedSample> test_set, std::span<const double> rates,
                        std::size_t finetune_epochs, const TrainConfig& config,
                        std::vector<FusionModel>* pruned_models) {
  for (std::size_t i = 1; i < rates.size(); ++i) {
    if (!(rates[i] > rates[i - 1])) fail(ErrorKind::RateOutOfRange, "pruning rates must be strictly increasing");
  }
  const auto labels = targets_of(test_set, config.loss_mode);
  PruneReport report;
  for (double rate : rates) {
    FusionModel base = trained;
    const PrunePlan plan = make_plan(base, rate);
    FusionModel pruned = apply_plan(base, plan);
    PruneRow row;
    row.rate_percent = 100.0 * rate;
    row.acc_pre = accuracy(predict(pruned, test_set, config.loss_mode), labels);
    if (finetune_epochs > 0 && !train_set.empty()) {
      TrainConfig ft = config;
      ft.initial_lr = config.initial_lr * 0.1;
      ft.epochs = finetune_epochs;
      train(pruned, train_set, ft);
      row.acc_post = accuracy(predict(pruned, test_set, config.loss_mode), labels);
    } else {
      row.acc_post = row.acc_pre;
    }
    row.param_count = pruned.parameter_count();
    report.rows.push_back(row);
    if (pruned_models) pruned_models->push_back(std::move(pruned));
  }
  return report;
}

double select_optimal(std::span<const std::pair<double, double>> rate_accuracy, bool normalized) {
  if (rate_accuracy.empty()) fail(ErrorKind::EmptyReport, "no pruning rows to select from");
  // Percent or unit fractions; the same scale on both axes.
  const double scale = normalized ? 0.01 : 1.0;
  double best_rate = 0.0;
  double best_score = -1.0;
  for (const auto& [r, a] : rate_accuracy) {
    const double score = std::hypot(a * scale, r * scale);
    if (score > best_score || (score == best_score && r > best_rate)) {
      best_score = score;
      best_rate = r;
    }
  }
  return best_rate;
}

double select_optimal(const PruneReport& report, bool normalized) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : report.rows) pts.emplace_back(row.rate_percent, row.acc_post);
  return select_optimal(std::span<const std::pair<double, double>>(pts), normalized);
}

std::string encode_prune_report(const PruneReport& report) {
  CsvWriter csv({"rate_percent", "acc_pre", "acc_post", "param_count"});
  for (const auto& r : report.rows) csv.row(r.rate_percent, r.acc_pre, r.acc_post, r.param_count);
  return csv.str();
}

}  // namespace gfd

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gfd/dataset.hpp"
#include "gfd/error.hpp"
#include "gfd/training.hpp"
#include "test_support.hpp"

namespace gfd {
namespace {

Tensor logits_of(std::initializer_list<double> z, std::size_t k = 1) {
  Tensor t({z.size() / k, k});
  std::size_t i = 0;
  for (double v : z) t[i++] = v;
  return t;
}

TEST(Bce, KnownValues) {
  const std::vector<int> one{1}, zero{0};
  EXPECT_NEAR(bce_loss(logits_of({0.0}), one).loss, std::log(2.0), 1e-15);
  EXPECT_NEAR(bce_loss(logits_of({2.0}), zero).loss, 2.0 + std::log1p(std::exp(-2.0)), 1e-14);
  EXPECT_NEAR(bce_loss(logits_of({2.0}), one).loss, std::log1p(std::exp(-2.0)), 1e-14);
  const auto r = bce_loss(logits_of({0.0}), one);
  EXPECT_NEAR(r.grad[0], -0.5, 1e-15);
}

TEST(Bce, StableForLargeLogits) {
  const std::vector<int> one{1}, zero{0};
  const auto big = bce_loss(logits_of({1000.0}), one);
  EXPECT_TRUE(std::isfinite(big.loss));
  EXPECT_NEAR(big.loss, 0.0, 1e-300);
  EXPECT_NEAR(bce_loss(logits_of({-1000.0}), one).loss, 1000.0, 1e-9);
  EXPECT_NEAR(bce_loss(logits_of({1000.0}), zero).loss, 1000.0, 1e-9);
  EXPECT_TRUE(std::isfinite(bce_loss(logits_of({-1000.0}), one).grad[0]));
}

TEST(Bce, MeanOverBatchAndGradient) {
  const std::vector<int> labels{1, 0, 1};
  Tensor z = logits_of({0.3, -1.2, 2.5});
  const auto r = bce_loss(z, labels);
  const auto numeric = testing::numeric_gradient(z, [&] { return bce_loss(z, labels).loss; });
  EXPECT_LT(testing::max_relative_error(r.grad.data(), numeric), 1e-7);
  EXPECT_NEAR(r.grad[0], (sigmoid(0.3) - 1.0) / 3.0, 1e-15);
}

TEST(Bce, RejectsBadLabels) {
  const std::vector<int> two{2};
  try {
    bce_loss(logits_of({0.0}), two);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LabelDomain);
  }
  const std::vector<int> pair{0, 1};
  EXPECT_THROW(bce_loss(logits_of({0.0}), pair), Error);
}

TEST(Softmax, UniformAndGradient) {
  const std::vector<int> labels{2};
  EXPECT_NEAR(softmax_cross_entropy(logits_of({0, 0, 0, 0}, 4), labels).loss, std::log(4.0), 1e-15);
  EXPECT_NEAR(softmax_cross_entropy(logits_of({1000, 0, 1000, 0}, 4), labels).loss, std::log(2.0), 1e-12);
  const std::vector<int> batch{0, 3};
  Tensor z = logits_of({0.1, -0.4, 2.0, 0.7, 1.5, 0.0, -1.0, 0.2}, 4);
  const auto r = softmax_cross_entropy(z, batch);
  const auto numeric = testing::numeric_gradient(z, [&] { return softmax_cross_entropy(z, batch).loss; });
  EXPECT_LT(testing::max_relative_error(r.grad.data(), numeric), 1e-7);
  const std::vector<int> outside{4};
  EXPECT_THROW(softmax_cross_entropy(logits_of({0, 0, 0, 0}, 4), outside), Error);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Parameter p({3});
  p.value[0] = 1.0, p.value[1] = -2.0, p.value[2] = 0.5;
  p.grad[0] = 3.0, p.grad[1] = -0.01, p.grad[2] = 0.0;
  Parameter* params[] = {&p};
  AdamState state = make_adam_state(params);
  adam_step(params, state, 0.1);
  EXPECT_NEAR(p.value[0], 1.0 - 0.1, 1e-8);
  EXPECT_NEAR(p.value[1], -2.0 + 0.1, 1e-6);
  EXPECT_EQ(p.value[2], 0.5);
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, MatchesReferenceRecurrence) {
  Parameter p({1});
  Parameter* params[] = {&p};
  AdamState state = make_adam_state(params);
  double m = 0, v = 0, x = 0;
  const double grads[] = {0.5, -1.0, 2.0, 0.25};
  for (int t = 1; t <= 4; ++t) {
    const double g = grads[t - 1];
    p.grad[0] = g;
    adam_step(params, state, 0.01);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1 - std::pow(0.9, t)), vh = v / (1 - std::pow(0.999, t));
    x -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    EXPECT_NEAR(p.value[0], x, 1e-14);
  }
}

TEST(Schedule, StepDecay) {
  TrainConfig c;
  EXPECT_DOUBLE_EQ(lr_at_epoch(c, 0), 1e-4);
  EXPECT_DOUBLE_EQ(lr_at_epoch(c, 2), 1e-4);
  EXPECT_DOUBLE_EQ(lr_at_epoch(c, 3), 0.8e-4);
  EXPECT_NEAR(lr_at_epoch(c, 14), 1e-4 * std::pow(0.8, 4), 1e-18);
}

Dataset small_dataset(std::uint64_t seed) {
  DatasetConfig d;
  d.windows_per_class = {20, 7, 7, 6};
  d.image_size = 32;
  d.window_len = 64;
  d.window_stride = 64;
  return build_dataset(d, seed);
}

TrainConfig fast_config() {
  TrainConfig c;
  c.channel_scale = 0.0625;
  c.epochs = 4;
  c.batch_size = 8;
  c.initial_lr = 2e-3;
  c.seed = 5;
  return c;
}

TEST(Train, LossDecreases) {
  const auto ds = small_dataset(1);
  auto c = fast_config();
  c.epochs = 6;
  FusionModel model = make_model(64, 32, c);
  const auto h = train(model, ds.train, c);
  ASSERT_EQ(h.size(), 6u);
  EXPECT_LT(h.back().loss, h.front().loss);
  EXPECT_EQ(h[0].epoch, 1u);
  EXPECT_DOUBLE_EQ(h[4].lr, lr_at_epoch(c, 4));
}

TEST(Train, SameSeedSameHistoryAndWeights) {
  const auto ds = small_dataset(2);
  const auto c = fast_config();
  FusionModel a = make_model(64, 32, c), b = make_model(64, 32, c);
  const auto ha = train(a, ds.train, c);
  const auto hb = train(b, ds.train, c);
  EXPECT_EQ(encode_history_csv(ha), encode_history_csv(hb));
  const auto pa = a.parameters(), pb = b.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->value, pb[i]->value);
  auto other = c;
  other.seed = 6;
  FusionModel d = make_model(64, 32, other);
  EXPECT_NE(encode_history_csv(train(d, ds.train, other)), encode_history_csv(ha));
}

TEST(Train, MemorizesSingleSample) {
  DatasetConfig d;
  d.windows_per_class = {4, 2, 2, 2};
  const auto ds = build_dataset(d, 3);
  auto c = fast_config();
  c.augment_epsilons.clear();
  c.flip_probability = 0.0;
  c.batch_size = 1;
  c.epochs = 60;
  c.initial_lr = 1e-2;
  c.decay_every = 1000;
  // 64x64 images keep a 2x2 map at the last batch-norm, so a batch of one
  // still carries spatial variance.
  std::vector<PairedSample> one{ds.train[0]};
  FusionModel model = make_model(64, 64, c);
  const auto h = train(model, one, c);
  EXPECT_LT(h.back().loss, 0.05);
  EXPECT_EQ(predict(model, one, c.loss_mode)[0], binary_target(one[0].label));
}

TEST(Train, MulticlassMode) {
  const auto ds = small_dataset(4);
  auto c = fast_config();
  c.loss_mode = LossMode::MulticlassSoftmax;
  c.epochs = 2;
  FusionModel model = make_model(64, 32, c);
  EXPECT_EQ(model.config().num_outputs, 4u);
  const auto h = train(model, ds.train, c);
  EXPECT_EQ(h.size(), 2u);
  for (int p : predict(model, ds.test, c.loss_mode)) EXPECT_TRUE(p >= 0 && p < 4);
  EXPECT_EQ(targets_of(ds.test, c.loss_mode).size(), ds.test.size());
}

TEST(Train, Errors) {
  auto c = fast_config();
  FusionModel model = make_model(64, 32, c);
  try {
    train(model, std::span<const PairedSample>{}, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyDataset);
  }
  auto multi = c;
  multi.loss_mode = LossMode::MulticlassSoftmax;
  const auto ds = small_dataset(5);
  EXPECT_THROW(train(model, ds.train, multi), Error);
}

TEST(History, CsvLayout) {
  History h{{1, 1e-4, 0.5, 75.0}};
  const auto csv = encode_history_csv(h);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,lr,loss,train_acc");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

}  // namespace
}  // namespace gfd

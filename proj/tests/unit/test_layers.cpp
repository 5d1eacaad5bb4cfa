#include <gtest/gtest.h>

#include <cmath>

#include "gfd/error.hpp"
#include "gfd/layers.hpp"
#include "test_support.hpp"

namespace gfd::nn {
namespace {

using gfd::testing::dot;
using gfd::testing::max_relative_error;
using gfd::testing::numeric_gradient;
using gfd::testing::random_tensor;

constexpr double kTol = 1e-5;

// Loss L = <forward_train(x), r> so that dL/dy = r.
template <typename Layer>
double input_gradient_error(Layer& layer, Tensor x, std::uint64_t seed) {
  const Tensor y = layer.forward_train(x);
  const Tensor r = random_tensor(y.shape(), seed);
  const Tensor dx = layer.backward(r);
  const auto numeric = numeric_gradient(x, [&] { return dot(layer.forward_train(x), r); });
  return max_relative_error(dx.data(), numeric);
}

template <typename Layer>
double parameter_gradient_error(Layer& layer, Parameter& p, const Tensor& x, std::uint64_t seed) {
  const Tensor y = layer.forward_train(x);
  const Tensor r = random_tensor(y.shape(), seed);
  p.zero_grad();
  layer.backward(r);
  const Tensor analytic = p.grad;
  const auto numeric = numeric_gradient(p.value, [&] { return dot(layer.forward_train(x), r); });
  return max_relative_error(analytic.data(), numeric);
}

TEST(Conv2d, OutputShape) {
  Conv2d conv(3, 5, 3, 3, 2, 1, 1);
  Rng rng(1);
  conv.init(rng);
  EXPECT_EQ(conv.forward(Tensor({2, 3, 8, 8})).shape(), (std::vector<std::size_t>{2, 5, 4, 4}));
  Conv2d row(1, 4, 1, 3, 1, 0, 1);
  EXPECT_EQ(row.forward(Tensor({2, 1, 1, 16})).shape(), (std::vector<std::size_t>{2, 4, 1, 16}));
}

TEST(Conv2d, KnownValues) {
  Conv2d conv(1, 1, 2, 2, 1, 0, 0);
  conv.weight.value.fill(1.0);
  conv.bias.value[0] = 0.5;
  Tensor x({1, 1, 2, 3});
  for (std::size_t i = 0; i < 6; ++i) x[i] = static_cast<double>(i);
  const Tensor y = conv.forward(x);
  ASSERT_EQ(y.size(), 2u);
  EXPECT_DOUBLE_EQ(y[0], 0 + 1 + 3 + 4 + 0.5);
  EXPECT_DOUBLE_EQ(y[1], 1 + 2 + 4 + 5 + 0.5);
}

TEST(Conv2d, Gradients) {
  for (std::size_t stride : {1, 2}) {
    Conv2d conv(2, 3, 3, 3, stride, 1, 1);
    Rng rng(2);
    conv.init(rng);
    const Tensor x = random_tensor({2, 2, 5, 5}, 3);
    EXPECT_LT(input_gradient_error(conv, x, 4), kTol);
    EXPECT_LT(parameter_gradient_error(conv, conv.weight, x, 5), kTol);
    EXPECT_LT(parameter_gradient_error(conv, conv.bias, x, 6), kTol);
  }
}

TEST(Conv2d, BackwardWithoutForwardThrows) {
  Conv2d conv(1, 1, 1, 1, 1, 0, 0);
  try {
    conv.backward(Tensor({1, 1, 1, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoForwardCache);
  }
}

TEST(BatchNorm2d, TrainingOutputIsNormalized) {
  BatchNorm2d bn(3, 1e-12);
  const Tensor x = random_tensor({4, 3, 5, 5}, 7, 3.0);
  const Tensor y = bn.forward_train(x);
  const std::size_t plane = 25;
  for (std::size_t c = 0; c < 3; ++c) {
    double sum = 0, sq = 0;
    for (std::size_t b = 0; b < 4; ++b)
      for (std::size_t i = 0; i < plane; ++i) sum += y[(b * 3 + c) * plane + i];
    const double mean = sum / 100.0;
    for (std::size_t b = 0; b < 4; ++b)
      for (std::size_t i = 0; i < plane; ++i) sq += std::pow(y[(b * 3 + c) * plane + i] - mean, 2);
    EXPECT_NEAR(mean, 0.0, 1e-6);
    EXPECT_NEAR(sq / 100.0, 1.0, 1e-6);
  }
}

TEST(BatchNorm2d, DefaultEpsilonShrinksVariance) {
  BatchNorm2d bn(1);
  Tensor x = random_tensor({2, 1, 4, 4}, 8, 0.01);
  const Tensor y = bn.forward_train(x);
  double mean = 0, var = 0, ym = 0, yv = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mean += x[i], ym += y[i];
  mean /= x.size();
  ym /= y.size();
  for (std::size_t i = 0; i < x.size(); ++i) var += std::pow(x[i] - mean, 2), yv += std::pow(y[i] - ym, 2);
  var /= x.size();
  yv /= y.size();
  EXPECT_NEAR(yv, var / (var + bn.eps()), 1e-9);
}

TEST(BatchNorm2d, InferenceUsesRunningStatistics) {
  BatchNorm2d bn(1);
  bn.running_mean[0] = 2.0;
  bn.running_var[0] = 4.0 - 1e-5;
  bn.gamma.value[0] = 3.0;
  bn.beta.value[0] = 1.0;
  Tensor x({1, 1, 1, 1}, 6.0);
  EXPECT_NEAR(bn.forward(x)[0], 3.0 * (6.0 - 2.0) / 2.0 + 1.0, 1e-12);
}

TEST(BatchNorm2d, Gradients) {
  BatchNorm2d bn(3);
  Rng rng(9);
  for (auto& g : bn.gamma.value.data()) g = rng.uniform(0.5, 1.5);
  for (auto& b : bn.beta.value.data()) b = rng.uniform(-0.5, 0.5);
  const Tensor x = random_tensor({3, 3, 4, 4}, 10);
  EXPECT_LT(input_gradient_error(bn, x, 11), kTol);
  EXPECT_LT(parameter_gradient_error(bn, bn.gamma, x, 12), kTol);
  EXPECT_LT(parameter_gradient_error(bn, bn.beta, x, 13), kTol);
}

TEST(ChannelSelect, MasksAndGradients) {
  ChannelSelect sel(3);
  sel.mask[1] = 0.0;
  const Tensor x = random_tensor({2, 3, 2, 2}, 14);
  const Tensor y = sel.forward(x);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_EQ(y[(b * 3 + 1) * 4 + i], 0.0);
      EXPECT_EQ(y[(b * 3 + 2) * 4 + i], x[(b * 3 + 2) * 4 + i]);
    }
  sel.forward_train(x);
  const Tensor dx = sel.backward(Tensor(x.shape(), 1.0));
  EXPECT_EQ(dx[4], 0.0);
  EXPECT_EQ(dx[0], 1.0);
  EXPECT_LT(input_gradient_error(sel, x, 15), kTol);
}

TEST(ReLU, Gradients) {
  ReLU relu;
  Tensor x = random_tensor({2, 2, 3, 3}, 16);
  // Keep entries away from the kink so central differences are exact.
  for (auto& v : x.data()) v += v > 0 ? 0.1 : -0.1;
  EXPECT_LT(input_gradient_error(relu, x, 17), kTol);
  EXPECT_EQ(relu.forward(Tensor({1}, -2.0))[0], 0.0);
}

TEST(MaxPool2, ValuesAndGradients) {
  MaxPool2 pool;
  Tensor x({1, 1, 2, 4});
  const double v[] = {1, 5, 2, 0, 3, 4, 8, 7};
  for (std::size_t i = 0; i < 8; ++i) x[i] = v[i];
  const Tensor y = pool.forward(x);
  ASSERT_EQ(y.shape(), (std::vector<std::size_t>{1, 1, 1, 2}));
  EXPECT_EQ(y[0], 5.0);
  EXPECT_EQ(y[1], 8.0);
  EXPECT_LT(input_gradient_error(pool, random_tensor({2, 2, 4, 4}, 18), 19), kTol);
}

TEST(GlobalMaxPool, ValuesAndGradients) {
  GlobalMaxPool pool;
  const Tensor x = random_tensor({2, 3, 3, 3}, 20);
  const Tensor y = pool.forward(x);
  ASSERT_EQ(y.shape(), (std::vector<std::size_t>{2, 3}));
  double m = x[0];
  for (std::size_t i = 0; i < 9; ++i) m = std::max(m, x[i]);
  EXPECT_EQ(y[0], m);
  EXPECT_LT(input_gradient_error(pool, x, 21), kTol);
}

TEST(HeightMax, ValuesAndGradients) {
  HeightMax hm;
  Tensor x({1, 2, 2, 2});
  const double v[] = {1, 9, 4, 2, -1, -3, -2, -4};
  for (std::size_t i = 0; i < 8; ++i) x[i] = v[i];
  const Tensor y = hm.forward(x);
  ASSERT_EQ(y.shape(), (std::vector<std::size_t>{1, 4}));
  EXPECT_EQ(y[0], 4.0);
  EXPECT_EQ(y[1], 9.0);
  EXPECT_EQ(y[2], -1.0);
  EXPECT_EQ(y[3], -3.0);
  EXPECT_LT(input_gradient_error(hm, random_tensor({2, 3, 4, 4}, 22), 23), kTol);
}

TEST(ChannelDrop, InferenceIdentityAndTrainingScale) {
  ChannelDrop drop(0.5);
  const Tensor x = random_tensor({4, 8, 2, 2}, 24);
  EXPECT_EQ(drop.forward(x), x);
  Rng rng(25);
  const Tensor y = drop.forward_train(x, rng);
  for (std::size_t bc = 0; bc < 32; ++bc) {
    const double ratio = y[bc * 4] / x[bc * 4];
    EXPECT_TRUE(std::abs(ratio) < 1e-15 || std::abs(ratio - 2.0) < 1e-12);
    for (std::size_t i = 1; i < 4; ++i) EXPECT_NEAR(y[bc * 4 + i], ratio * x[bc * 4 + i], 1e-12);
  }
  const Tensor dy = random_tensor(x.shape(), 26);
  const Tensor dx = drop.backward(dy);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(dx[i], dy[i] * y[i] / x[i], 1e-9);
}

TEST(ChannelDrop, KeepFractionMatchesRate) {
  ChannelDrop drop(0.9);
  Rng rng(27);
  const Tensor y = drop.forward_train(Tensor({100, 100, 1, 1}, 1.0), rng);
  std::size_t kept = 0;
  for (double v : y.data()) kept += v != 0.0;
  EXPECT_NEAR(kept / 10000.0, 0.9, 0.01);
}

TEST(Linear, ValuesAndGradients) {
  Linear lin(3, 2);
  Rng rng(28);
  lin.init(rng);
  Tensor x({1, 3});
  x[0] = 1, x[1] = 2, x[2] = 3;
  const Tensor y = lin.forward(x);
  for (std::size_t o = 0; o < 2; ++o) {
    double expect = lin.bias.value[o];
    for (std::size_t i = 0; i < 3; ++i) expect += lin.weight.value[o * 3 + i] * x[i];
    EXPECT_NEAR(y[o], expect, 1e-12);
  }
  const Tensor xb = random_tensor({4, 3}, 29);
  EXPECT_LT(input_gradient_error(lin, xb, 30), kTol);
  EXPECT_LT(parameter_gradient_error(lin, lin.weight, xb, 31), kTol);
  EXPECT_LT(parameter_gradient_error(lin, lin.bias, xb, 32), kTol);
}

TEST(Add, ShapeChecked) {
  const Tensor a({2, 2}, 1.0), b({2, 2}, 2.0);
  EXPECT_EQ(add(a, b), Tensor({2, 2}, 3.0));
  try {
    add(a, Tensor({4}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

}  // namespace
}  // namespace gfd::nn

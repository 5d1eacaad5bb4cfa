#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "gfd/augmentation.hpp"
#include "gfd/error.hpp"
#include "gfd/rng.hpp"

namespace gfd {
namespace {

std::vector<double> sine(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(0.05 * static_cast<double>(i)) + 0.3;
  return v;
}

GrayImage gradient_image(std::size_t n) {
  GrayImage img(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) img(r, c) = static_cast<std::uint8_t>((r * 7 + c * 3) % 256);
  }
  return img;
}

TEST(Snr, Examples) {
  EXPECT_DOUBLE_EQ(epsilon_to_snr(0.1), 20.0);
  EXPECT_DOUBLE_EQ(epsilon_to_snr(1.0), 0.0);
  EXPECT_NEAR(epsilon_to_snr(0.05), 26.0206, 1e-4);
  EXPECT_THROW(epsilon_to_snr(0.0), Error);
  for (double e : {1e-3, 0.05, 0.2, 0.5, 3.0}) EXPECT_NEAR(snr_to_epsilon(epsilon_to_snr(e)), e, 1e-12);
}

TEST(Rms, Examples) {
  EXPECT_DOUBLE_EQ(rms(std::vector<double>{3, -3, 3, -3}), 3.0);
  EXPECT_DOUBLE_EQ(rms(std::vector<double>{0, 0, 0}), 0.0);
  EXPECT_NEAR(rms(std::vector<double>{1, 2, 3, 4}), std::sqrt(7.5), 1e-15);
  EXPECT_THROW(rms(std::vector<double>{}), Error);
}

TEST(NoiseSigma, Examples) {
  EXPECT_DOUBLE_EQ(noise_sigma(std::vector<double>{2, -2}, 0.5), 1.0);
  EXPECT_NEAR(noise_sigma(std::vector<double>{3, -3, 3}, 0.1), 0.3, 1e-15);
  try {
    noise_sigma(std::vector<double>{0, 0}, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroSignal);
  }
}

TEST(SeriesNoise, RealizedFractionAtLength1e5) {
  const auto x = sine(100000);
  const auto y = add_series_noise(x, 0.2, 42);
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = y[i] - x[i];
  const double realized = rms(d) / rms(x);
  EXPECT_GE(realized, 0.195);
  EXPECT_LE(realized, 0.205);
}

TEST(SeriesNoise, DeterministicAndTinyAtTinyEpsilon) {
  const auto x = sine(1000);
  EXPECT_EQ(add_series_noise(x, 0.1, 3), add_series_noise(x, 0.1, 3));
  EXPECT_NE(add_series_noise(x, 0.1, 3), add_series_noise(x, 0.1, 4));
  const auto y = add_series_noise(x, 1e-9, 5);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(y[i] - x[i]));
  EXPECT_LT(worst, 1e-7 * rms(x));
}

TEST(Schedule, Examples) {
  const auto one = make_schedule(1, 0.1, 0.1);
  ASSERT_EQ(one.steps(), 1u);
  EXPECT_DOUBLE_EQ(one.alpha_bar[0], 0.9);

  const auto half = make_schedule(3, 0.5, 0.5);
  EXPECT_DOUBLE_EQ(half.alpha_bar[0], 0.5);
  EXPECT_DOUBLE_EQ(half.alpha_bar[1], 0.25);
  EXPECT_DOUBLE_EQ(half.alpha_bar[2], 0.125);

  EXPECT_THROW(make_schedule(0, 0.1, 0.2), Error);
  EXPECT_THROW(make_schedule(5, 0.2, 0.1), Error);
  EXPECT_THROW(make_schedule(5, 0.0, 0.1), Error);
}

TEST(Schedule, DefaultCumulativeProduct) {
  const auto s = make_schedule(1000, 1e-4, 0.02);
  // Independent oracle: log-space sum of the linear ramp.
  double log_prod = 0.0;
  for (int t = 0; t < 1000; ++t) log_prod += std::log1p(-(1e-4 + (0.02 - 1e-4) * t / 999.0));
  EXPECT_NEAR(s.alpha_bar.back(), std::exp(log_prod), 1e-15);
  EXPECT_LT(s.alpha_bar.back(), 0.01);
  for (std::size_t t = 1; t < s.steps(); ++t) EXPECT_LT(s.alpha_bar[t], s.alpha_bar[t - 1]);
  for (double a : s.alpha_bar) {
    EXPECT_GT(a, 0.0);
    EXPECT_LT(a, 1.0);
  }
}

TEST(Diffusion, ZeroBetaIsIdentity) {
  const std::vector<double> betas(5, 0.0);
  const auto s = schedule_from_betas(betas);
  const auto img = gradient_image(16);
  for (std::size_t t = 1; t <= 5; ++t) {
    EXPECT_EQ(diffuse_image(img, t, s, 7), img);
    EXPECT_EQ(stepwise_diffuse(img, t, s, 7), img);
  }
}

TEST(Diffusion, StepRangeChecked) {
  const auto s = make_schedule(10, 1e-4, 0.02);
  const auto img = gradient_image(8);
  for (std::size_t bad : {std::size_t{0}, std::size_t{11}}) {
    try {
      diffuse_image(img, bad, s, 1);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::StepOutOfRange);
    }
    EXPECT_THROW(stepwise_diffuse(img, bad, s, 1), Error);
  }
}

TEST(Diffusion, DeterministicGivenSeed) {
  const auto s = make_schedule(100, 1e-4, 0.02);
  const auto img = gradient_image(32);
  EXPECT_EQ(diffuse_image(img, 50, s, 9), diffuse_image(img, 50, s, 9));
  EXPECT_NE(diffuse_image(img, 50, s, 9), diffuse_image(img, 50, s, 10));
}

TEST(Diffusion, ClosedFormVarianceMonteCarlo) {
  const auto s = make_schedule(1000, 1e-4, 0.02);
  const std::vector<double> x0{0.8, -0.3, 0.0, 0.5};
  const std::size_t t = 200;
  const double keep = std::sqrt(s.alpha_bar[t - 1]);
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    const auto xt = diffuse_signal(x0, t, s, mix_seed(1, trial));
    for (std::size_t k = 0; k < x0.size(); ++k) {
      const double r = xt[k] - keep * x0[k];
      sum += r;
      sq += r * r;
      ++n;
    }
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_NEAR(var / (1.0 - s.alpha_bar[t - 1]), 1.0, 0.05);
}

TEST(Diffusion, FullyNoisedPixelsFollowClampedGaussian) {
  const auto s = make_schedule(1000, 1e-4, 0.02);
  const GrayImage img(100, 128);
  const auto out = diffuse_image(img, 1000, s, 12);
  std::vector<double> v;
  for (auto p : out.pixels()) v.push_back(pixel_to_signed(p));
  std::sort(v.begin(), v.end());
  // Kolmogorov-Smirnov distance against the clamped N(sqrt(abar) x0, 1 - abar)
  // law, evaluated on the quantization grid.
  const double mu = std::sqrt(s.alpha_bar.back()) * pixel_to_signed(128);
  const double sd = std::sqrt(1.0 - s.alpha_bar.back());
  auto cdf = [&](double x) {
    if (x >= 1.0) return 1.0;
    return 0.5 * std::erfc(-(x - mu) / (sd * std::sqrt(2.0)));
  };
  double d = 0.0;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    // Pixel value p holds the mass of reals that round to it.
    const double upper = std::min(1.0, v[i] + 1.0 / 255.0);
    d = std::max(d, std::abs(static_cast<double>(j) / n - cdf(upper)));
    i = j;
  }
  EXPECT_LT(d, 1.63 / std::sqrt(n));  // alpha = 0.01
}

TEST(Diffusion, StepwiseMatchesClosedFormMoments) {
  const auto s = make_schedule(1000, 1e-4, 0.02);
  const std::vector<double> x0(64, 0.7);
  for (std::size_t t = 1; t <= 10; ++t) {
    double m_closed = 0, m_step = 0, q_closed = 0, q_step = 0;
    std::size_t n = 0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
      const auto a = diffuse_signal(x0, t, s, mix_seed(10 + t, k));
      const auto b = stepwise_diffuse_signal(x0, t, s, mix_seed(20 + t, k));
      for (std::size_t i = 0; i < x0.size(); ++i) {
        m_closed += a[i];
        m_step += b[i];
        q_closed += a[i] * a[i];
        q_step += b[i] * b[i];
        ++n;
      }
    }
    m_closed /= n;
    m_step /= n;
    const double v_closed = q_closed / n - m_closed * m_closed;
    const double v_step = q_step / n - m_step * m_step;
    EXPECT_NEAR(m_step / m_closed, 1.0, 0.03) << "t=" << t;
    EXPECT_NEAR(v_step / v_closed, 1.0, 0.03) << "t=" << t;
    EXPECT_NEAR(m_closed / (std::sqrt(s.alpha_bar[t - 1]) * 0.7), 1.0, 0.03) << "t=" << t;
    EXPECT_NEAR(v_closed / (1.0 - s.alpha_bar[t - 1]), 1.0, 0.03) << "t=" << t;
  }
}

TEST(Perturb, ExactCountAndEdges) {
  const auto img = gradient_image(64);
  EXPECT_EQ(perturb_image(img, 0.0, 1), img);
  EXPECT_THROW(perturb_image(img, 1.5, 1), Error);
  const auto p = perturb_image(img, 0.1, 2);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < 4096; ++i) changed += p.pixels()[i] != img.pixels()[i];
  EXPECT_LE(changed, 410u);
  EXPECT_GE(changed, 390u);  // ~1/256 of 410 coincide with the old value
  EXPECT_EQ(perturb_image(img, 0.1, 2), p);
}

TEST(Perturb, FullFractionResamplesEverything) {
  const GrayImage img(64, 77);
  const auto p = perturb_image(img, 1.0, 3);
  std::size_t same = 0;
  for (auto v : p.pixels()) same += v == 77;
  EXPECT_LT(same, 40u);  // expected 16
}

TEST(SaltPepper, OnlyExtremes) {
  const GrayImage img(32, 100);
  const auto p = salt_pepper_image(img, 0.25, 4);
  std::size_t hits = 0;
  for (auto v : p.pixels()) {
    EXPECT_TRUE(v == 100 || v == 0 || v == 255);
    hits += v != 100;
  }
  EXPECT_EQ(hits, 256u);
}

TEST(GaussianImageNoise, ZeroSigmaIdentityAndClamp) {
  const auto img = gradient_image(16);
  EXPECT_EQ(gaussian_image_noise(img, 0.0, 1), img);
  const auto loud = gaussian_image_noise(img, 1e6, 1);
  for (auto v : loud.pixels()) EXPECT_TRUE(v == 0 || v == 255);
}

TEST(Flip, MirrorsColumns) {
  const auto img = gradient_image(8);
  const auto f = flip_horizontal(img);
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(f(r, c), img(r, 7 - c));
  }
  EXPECT_EQ(flip_horizontal(f), img);
}

}  // namespace
}  // namespace gfd

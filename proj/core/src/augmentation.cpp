#include "gfd/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gfd/error.hpp"
#include "gfd/rng.hpp"

namespace gfd {
namespace {

void check_step(std::size_t t, const NoiseSchedule& schedule) {
  if (t < 1 || t > schedule.steps()) {
    fail(ErrorKind::StepOutOfRange,
         "step " + std::to_string(t) + " outside [1, " + std::to_string(schedule.steps()) + "]");
  }
}

std::vector<double> to_signed(const GrayImage& image) {
  std::vector<double> x;
  x.reserve(image.pixels().size());
  for (auto p : image.pixels()) x.push_back(pixel_to_signed(p));
  return x;
}

GrayImage from_signed(std::span<const double> x, std::size_t size) {
  GrayImage out(size);
  auto px = out.pixels();
  for (std::size_t k = 0; k < x.size(); ++k) px[k] = quantize(std::clamp(x[k], -1.0, 1.0));
  return out;
}

}  // namespace

double epsilon_to_snr(double epsilon) {
  if (!(epsilon > 0.0)) fail(ErrorKind::DomainError, "noise fraction must be > 0");
  return 20.0 * std::log10(1.0 / epsilon);
}

double snr_to_epsilon(double snr_db) {
  if (!std::isfinite(snr_db)) fail(ErrorKind::DomainError, "SNR must be finite");
  return std::pow(10.0, -snr_db / 20.0);
}

double rms(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::EmptySeries, "rms of an empty series");
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return std::sqrt(acc / static_cast<double>(values.size()));
}

double noise_sigma(std::span<const double> values, double epsilon) {
  if (!(epsilon > 0.0)) fail(ErrorKind::DomainError, "noise fraction must be > 0");
  const double r = rms(values);
  if (r == 0.0) fail(ErrorKind::ZeroSignal, "signal rms is zero");
  return epsilon * r;
}

std::vector<double> add_series_noise(std::span<const double> values, double epsilon,
                                     std::uint64_t seed) {
  const double sigma = noise_sigma(values, epsilon);
  Rng rng(seed);
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) v += sigma * rng.gaussian();
  return out;
}

NoiseSchedule schedule_from_betas(std::span<const double> betas) {
  if (betas.empty()) fail(ErrorKind::DomainError, "schedule needs at least one step");
  NoiseSchedule s;
  double running = 1.0;
  for (double b : betas) {
    if (!(b >= 0.0 && b < 1.0)) fail(ErrorKind::DomainError, "beta outside [0, 1)");
    s.alpha.push_back(1.0 - b);
    running *= 1.0 - b;
    s.alpha_bar.push_back(running);
  }
  return s;
}

NoiseSchedule make_schedule(std::size_t steps, double beta_start, double beta_end) {
  if (steps < 1) fail(ErrorKind::DomainError, "schedule needs at least one step");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
    fail(ErrorKind::DomainError, "need 0 < beta_start <= beta_end < 1");
  }
  std::vector<double> betas(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(t) / static_cast<double>(steps - 1);
    betas[t] = beta_start + (beta_end - beta_start) * frac;
  }
  return schedule_from_betas(betas);
}

double pixel_to_signed(std::uint8_t p) { return 2.0 * static_cast<double>(p) / 255.0 - 1.0; }

std::vector<double> diffuse_signal(std::span<const double> x0, std::size_t t,
                                   const NoiseSchedule& schedule, std::uint64_t seed) {
  check_step(t, schedule);
  const double abar = schedule.alpha_bar[t - 1];
  const double keep = std::sqrt(abar);
  const double spread = std::sqrt(1.0 - abar);
  Rng rng(seed);
  std::vector<double> out(x0.size());
  for (std::size_t k = 0; k < x0.size(); ++k) out[k] = keep * x0[k] + spread * rng.gaussian();
  return out;
}

std::vector<double> stepwise_diffuse_signal(std::span<const double> x0, std::size_t t,
                                            const NoiseSchedule& schedule, std::uint64_t seed) {
  check_step(t, schedule);
  Rng rng(seed);
  std::vector<double> x(x0.begin(), x0.end());
  for (std::size_t step = 0; step < t; ++step) {
    const double a = schedule.alpha[step];
    const double keep = std::sqrt(a);
    const double spread = std::sqrt(1.0 - a);
    for (double& v : x) v = keep * v + spread * rng.gaussian();
  }
  return x;
}

GrayImage diffuse_image(const GrayImage& image, std::size_t t, const NoiseSchedule& schedule,
                        std::uint64_t seed) {
  return from_signed(diffuse_signal(to_signed(image), t, schedule, seed), image.size());
}

GrayImage stepwise_diffuse(const GrayImage& image, std::size_t t, const NoiseSchedule& schedule,
                           std::uint64_t seed) {
  return from_signed(stepwise_diffuse_signal(to_signed(image), t, schedule, seed), image.size());
}

namespace {

// Partial Fisher-Yates over pixel positions: round(fraction * N^2) distinct
// pixels get a value drawn by `draw`.
template <typename Draw>
GrayImage replace_pixels(const GrayImage& image, double fraction, std::uint64_t seed, Draw draw) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    fail(ErrorKind::DomainError, "perturbation fraction outside [0, 1]");
  }
  GrayImage out = image;
  auto px = out.pixels();
  const std::size_t total = px.size();
  const auto count = static_cast<std::size_t>(std::round(fraction * static_cast<double>(total)));
  if (count == 0) return out;

  std::vector<std::size_t> positions(total);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(positions[i], positions[j]);
    px[positions[i]] = draw(rng);
  }
  return out;
}

}  // namespace

GrayImage perturb_image(const GrayImage& image, double fraction, std::uint64_t seed) {
  return replace_pixels(image, fraction, seed, [](Rng& rng) { return static_cast<std::uint8_t>(rng.below(256)); });
}

GrayImage salt_pepper_image(const GrayImage& image, double fraction, std::uint64_t seed) {
  return replace_pixels(image, fraction, seed,
                        [](Rng& rng) { return static_cast<std::uint8_t>(rng.below(2) == 0 ? 0 : 255); });
}

GrayImage gaussian_image_noise(const GrayImage& image, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) fail(ErrorKind::DomainError, "noise deviation must be non-negative");
  if (sigma == 0.0) return image;
  auto x = to_signed(image);
  Rng rng(seed);
  for (double& v : x) v += sigma * rng.gaussian();
  return from_signed(x, image.size());
}

GrayImage flip_horizontal(const GrayImage& image) {
  const std::size_t n = image.size();
  GrayImage out(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) out(r, c) = image(r, n - 1 - c);
  }
  return out;
}

}  // namespace gfd

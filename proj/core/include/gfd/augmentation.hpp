#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gfd/series_transform.hpp"

namespace gfd {

/// SNR in dB for a noise fraction epsilon: 20*log10(1/epsilon).
double epsilon_to_snr(double epsilon);
double snr_to_epsilon(double snr_db);

double rms(std::span<const double> values);

/// Noise standard deviation epsilon * rms(series).
double noise_sigma(std::span<const double> values, double epsilon);

/// Adds iid zero-mean Gaussian noise with sigma = epsilon * rms(values).
std::vector<double> add_series_noise(std::span<const double> values, double epsilon,
                                     std::uint64_t seed);

/// Forward-diffusion noise schedule with a linear beta ramp.
struct NoiseSchedule {
  std::vector<double> alpha;      // 1 - beta_t, t = 1..T stored at index t-1
  std::vector<double> alpha_bar;  // running product of alpha

  std::size_t steps() const noexcept { return alpha.size(); }
};

NoiseSchedule make_schedule(std::size_t steps, double beta_start, double beta_end);

/// Schedule built from explicit betas. Accepts beta == 0 (identity steps),
/// which make_schedule rejects; used for degenerate checks.
NoiseSchedule schedule_from_betas(std::span<const double> betas);

/// Pixel <-> [-1, 1] mapping shared by the diffusion routines.
double pixel_to_signed(std::uint8_t p);

/// Closed-form forward noising x_t = sqrt(abar_t) x_0 + sqrt(1 - abar_t) eps,
/// applied per pixel in [-1, 1], clamped and re-quantized.
GrayImage diffuse_image(const GrayImage& image, std::size_t t, const NoiseSchedule& schedule,
                        std::uint64_t seed);

/// Real-valued (unclamped, unquantized) closed-form noising.
std::vector<double> diffuse_signal(std::span<const double> x0, std::size_t t,
                                   const NoiseSchedule& schedule, std::uint64_t seed);

/// One-step recursion x_t = sqrt(a_t) x_{t-1} + sqrt(1 - a_t) eps_{t-1}
/// applied t times. Exists to validate the closed form.
GrayImage stepwise_diffuse(const GrayImage& image, std::size_t t, const NoiseSchedule& schedule,
                           std::uint64_t seed);
std::vector<double> stepwise_diffuse_signal(std::span<const double> x0, std::size_t t,
                                            const NoiseSchedule& schedule, std::uint64_t seed);

/// Replaces exactly round(fraction * N^2) distinct pixels with uniform values.
GrayImage perturb_image(const GrayImage& image, double fraction, std::uint64_t seed);

/// Sets exactly round(fraction * N^2) distinct pixels to 0 or 255 with equal
/// probability.
GrayImage salt_pepper_image(const GrayImage& image, double fraction, std::uint64_t seed);

/// Adds N(0, sigma^2) per pixel in the [-1, 1] domain, then clamps and
/// re-quantizes.
GrayImage gaussian_image_noise(const GrayImage& image, double sigma, std::uint64_t seed);

/// Horizontal mirror (column j -> N-1-j).
GrayImage flip_horizontal(const GrayImage& image);

}  // namespace gfd

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gfd {

using Spectrum = std::vector<std::complex<double>>;

/// X[k] = sum_n x[n] exp(-2 pi j n k / N). Radix-2 FFT for power-of-two
/// lengths, table-driven direct summation otherwise.
Spectrum dft(std::span<const std::complex<double>> input);
Spectrum dft(std::span<const double> input);

/// Inverse transform including the 1/N factor.
std::vector<std::complex<double>> inverse_dft(std::span<const std::complex<double>> spectrum);

/// dft(fault - normal).
Spectrum diff_spectrum(std::span<const double> fault, std::span<const double> normal);

/// Magnitude of the analytic signal (Hilbert envelope).
std::vector<double> envelope(std::span<const double> signal);

/// |dft| of the mean-removed envelope.
std::vector<double> envelope_spectrum(std::span<const double> signal);

/// Predicted per-component (real or imaginary part) standard deviation of
/// DFT bins of white Gaussian noise with per-sample deviation sigma.
/// Complex input: sqrt(N) sigma. Real input (interior bins): sqrt(N/2) sigma.
double noise_spectrum_theory(std::size_t n, double sigma, bool complex_input);

struct NoiseSpectrumCheck {
  double empirical_std = 0.0;
  double theory_std = 0.0;
  double relative_error = 0.0;
};

/// Monte Carlo estimate of the pooled per-component bin deviation over
/// interior bins (k not in {0, N/2}), compared against the theory.
NoiseSpectrumCheck verify_noise_spectrum(std::size_t n, double sigma, std::size_t trials,
                                         std::uint64_t seed, bool complex_input);

/// CSV with header bin_index,real,imag,magnitude.
std::string encode_spectrum_csv(const Spectrum& spectrum);

}  // namespace gfd

#include "gfd/spectral.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "gfd/csv.hpp"
#include "gfd/error.hpp"
#include "gfd/rng.hpp"

namespace gfd {
namespace {

using cd = std::complex<double>;

// Twiddles exp(-2 pi j m / N) for m in [0, N), computed once per call.
std::vector<cd> twiddles(std::size_t n) {
  std::vector<cd> w(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
    w[m] = {std::cos(angle), std::sin(angle)};
  }
  return w;
}

Spectrum direct_dft(std::span<const cd> x) {
  const std::size_t n = x.size();
  const auto w = twiddles(n);
  Spectrum out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cd acc{0.0, 0.0};
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      acc += x[t] * w[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    out[k] = acc;
  }
  return out;
}

Spectrum radix2_fft(std::span<const cd> x) {
  const std::size_t n = x.size();
  Spectrum a(x.begin(), x.end());
  const int bits = std::countr_zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rev = 0;
    for (int b = 0; b < bits; ++b) rev |= ((i >> b) & 1U) << (bits - 1 - b);
    if (i < rev) std::swap(a[i], a[rev]);
  }
  const auto w = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const cd u = a[start + j];
        const cd v = a[start + j + half] * w[j * step];
        a[start + j] = u + v;
        a[start + j + half] = u - v;
      }
    }
  }
  return a;
}

}  // namespace

Spectrum dft(std::span<const cd> input) {
  if (input.empty()) fail(ErrorKind::EmptyInput, "dft of an empty series");
  return std::has_single_bit(input.size()) ? radix2_fft(input) : direct_dft(input);
}

Spectrum dft(std::span<const double> input) {
  std::vector<cd> c(input.begin(), input.end());
  return dft(std::span<const cd>(c));
}

std::vector<cd> inverse_dft(std::span<const cd> spectrum) {
  std::vector<cd> conj(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) conj[k] = std::conj(spectrum[k]);
  auto out = dft(std::span<const cd>(conj));
  const double scale = 1.0 / static_cast<double>(spectrum.size());
  for (auto& v : out) v = std::conj(v) * scale;
  return out;
}

Spectrum diff_spectrum(std::span<const double> fault, std::span<const double> normal) {
  if (fault.size() != normal.size()) {
    fail(ErrorKind::LengthMismatch, "fault and normal signals differ in length");
  }
  std::vector<double> d(fault.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = fault[i] - normal[i];
  return dft(std::span<const double>(d));
}

std::vector<double> envelope(std::span<const double> signal) {
  auto spec = dft(signal);
  const std::size_t n = spec.size();
  // Analytic signal: keep DC (and Nyquist), double positive, zero negative.
  for (std::size_t k = 1; k < n; ++k) {
    if (2 * k < n) spec[k] *= 2.0;
    else if (2 * k > n) spec[k] = 0.0;
  }
  const auto analytic = inverse_dft(spec);
  std::vector<double> env(n);
  for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(analytic[i]);
  return env;
}

std::vector<double> envelope_spectrum(std::span<const double> signal) {
  auto env = envelope(signal);
  double mean = 0.0;
  for (double v : env) mean += v;
  mean /= static_cast<double>(env.size());
  for (double& v : env) v -= mean;
  const auto spec = dft(std::span<const double>(env));
  std::vector<double> mag(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) mag[k] = std::abs(spec[k]);
  return mag;
}

double noise_spectrum_theory(std::size_t n, double sigma, bool complex_input) {
  const double len = static_cast<double>(n);
  return complex_input ? std::sqrt(len) * sigma : std::sqrt(len / 2.0) * sigma;
}

NoiseSpectrumCheck verify_noise_spectrum(std::size_t n, double sigma, std::size_t trials,
                                         std::uint64_t seed, bool complex_input) {
  if (n < 3) fail(ErrorKind::DomainError, "need N >= 3 for interior bins");
  if (trials < 100) fail(ErrorKind::DomainError, "need at least 100 trials");
  double sum_sq = 0.0;
  std::size_t count = 0;
  std::vector<cd> x(n);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(mix_seed(seed, trial));
    for (auto& v : x) {
      const double re = sigma * rng.gaussian();
      const double im = complex_input ? sigma * rng.gaussian() : 0.0;
      v = {re, im};
    }
    const auto spec = dft(std::span<const cd>(x));
    for (std::size_t k = 1; k < n; ++k) {
      if (2 * k == n) continue;
      sum_sq += spec[k].real() * spec[k].real() + spec[k].imag() * spec[k].imag();
      count += 2;
    }
  }
  NoiseSpectrumCheck out;
  // Components are zero-mean by construction; pool around 0.
  out.empirical_std = std::sqrt(sum_sq / static_cast<double>(count));
  out.theory_std = noise_spectrum_theory(n, sigma, complex_input);
  out.relative_error = out.theory_std == 0.0
                           ? std::abs(out.empirical_std)
                           : std::abs(out.empirical_std - out.theory_std) / out.theory_std;
  return out;
}

std::string encode_spectrum_csv(const Spectrum& spectrum) {
  CsvWriter csv({"bin_index", "real", "imag", "magnitude"});
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    csv.row(k, spectrum[k].real(), spectrum[k].imag(), std::abs(spectrum[k]));
  }
  return csv.str();
}

}  // namespace gfd

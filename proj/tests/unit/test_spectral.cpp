#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "gfd/rng.hpp"
#include "gfd/spectral.hpp"

namespace gfd {
namespace {

using cd = std::complex<double>;

Spectrum naive_dft(const std::vector<cd>& x) {
  const std::size_t n = x.size();
  Spectrum out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cd acc = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((t * k) % n) / static_cast<double>(n);
      acc += x[t] * cd(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  return out;
}

std::vector<cd> random_complex(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cd> x(n);
  for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
  return x;
}

TEST(Dft, MatchesNaiveOracle) {
  for (std::size_t n : {1, 2, 3, 8, 12, 64, 100, 256}) {
    const auto x = random_complex(n, n);
    const auto fast = dft(x);
    const auto ref = naive_dft(x);
    for (std::size_t k = 0; k < n; ++k) EXPECT_LT(std::abs(fast[k] - ref[k]), 1e-9 * std::sqrt(n)) << n;
  }
}

TEST(Dft, RealInputAgreesWithComplex) {
  Rng rng(1);
  std::vector<double> x(48);
  for (auto& v : x) v = rng.gaussian();
  const std::vector<cd> xc(x.begin(), x.end());
  const auto a = dft(x), b = dft(xc);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_LT(std::abs(a[k] - b[k]), 1e-12);
  for (std::size_t k = 1; k < x.size(); ++k) EXPECT_LT(std::abs(a[k] - std::conj(a[x.size() - k])), 1e-12);
}

TEST(Dft, ParsevalAndInverse) {
  for (std::size_t n : {64, 60}) {
    const auto x = random_complex(n, 2);
    const auto X = dft(x);
    double ex = 0, eX = 0;
    for (const auto& v : x) ex += std::norm(v);
    for (const auto& v : X) eX += std::norm(v);
    EXPECT_NEAR(eX / n, ex, 1e-9 * ex);
    const auto back = inverse_dft(X);
    for (std::size_t i = 0; i < n; ++i) EXPECT_LT(std::abs(back[i] - x[i]), 1e-12);
  }
}

TEST(Dft, Linearity) {
  const auto x = random_complex(32, 3), y = random_complex(32, 4);
  const cd a(1.5, -0.5), b(-2.0, 0.25);
  std::vector<cd> z(32);
  for (std::size_t i = 0; i < 32; ++i) z[i] = a * x[i] + b * y[i];
  const auto X = dft(x), Y = dft(y), Z = dft(z);
  for (std::size_t k = 0; k < 32; ++k) EXPECT_LT(std::abs(Z[k] - (a * X[k] + b * Y[k])), 1e-11);
}

TEST(Dft, PureToneBin) {
  std::vector<double> x(64);
  for (std::size_t i = 0; i < 64; ++i) x[i] = std::cos(2 * std::numbers::pi * 5 * i / 64.0);
  const auto X = dft(x);
  EXPECT_NEAR(std::abs(X[5]), 32.0, 1e-10);
  EXPECT_NEAR(std::abs(X[59]), 32.0, 1e-10);
  EXPECT_LT(std::abs(X[6]), 1e-10);
}

TEST(DiffSpectrum, ProperitesOfDifference) {
  Rng rng(5);
  std::vector<double> a(40), b(40);
  for (auto& v : a) v = rng.gaussian();
  for (auto& v : b) v = rng.gaussian();
  const auto d = diff_spectrum(a, b);
  const auto A = dft(a), B = dft(b);
  for (std::size_t k = 0; k < 40; ++k) EXPECT_LT(std::abs(d[k] - (A[k] - B[k])), 1e-12);
  for (const auto& v : diff_spectrum(a, a)) EXPECT_EQ(std::abs(v), 0.0);
  EXPECT_THROW(diff_spectrum(a, std::span(b).first(39)), std::exception);
}

TEST(Envelope, AmplitudeModulatedTone) {
  const std::size_t n = 1024;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    x[i] = (1.0 + 0.5 * std::cos(2 * std::numbers::pi * 8 * t / n)) * std::cos(2 * std::numbers::pi * 200 * t / n);
  }
  const auto env = envelope(x);
  for (std::size_t i = 0; i < n; ++i)
    EXPECT_NEAR(env[i], 1.0 + 0.5 * std::cos(2 * std::numbers::pi * 8 * static_cast<double>(i) / n), 1e-9);
  const auto es = envelope_spectrum(x);
  std::size_t best = 1;
  for (std::size_t k = 1; k < n / 2; ++k) if (es[k] > es[best]) best = k;
  EXPECT_EQ(best, 8u);
}

TEST(NoiseSpectrum, TheoryValues) {
  EXPECT_NEAR(noise_spectrum_theory(25, 1.0, true), 5.0, 1e-12);
  EXPECT_NEAR(noise_spectrum_theory(25, 1.0, false), 3.5355, 1e-4);
  EXPECT_NEAR(noise_spectrum_theory(100, 0.5, true), 5.0, 1e-12);
}

TEST(NoiseSpectrum, MonteCarloWithinTwoPercent) {
  for (bool complex_input : {true, false}) {
    const auto r = verify_noise_spectrum(64, 0.7, 2000, 6, complex_input);
    EXPECT_NEAR(r.theory_std, noise_spectrum_theory(64, 0.7, complex_input), 1e-12);
    EXPECT_LT(r.relative_error, 0.02) << complex_input;
    EXPECT_NEAR(r.relative_error, std::abs(r.empirical_std - r.theory_std) / r.theory_std, 1e-12);
  }
}

TEST(SpectrumCsv, Layout) {
  const Spectrum s{{1, 0}, {0, -2}};
  const auto csv = encode_spectrum_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "bin_index,real,imag,magnitude");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

}  // namespace
}  // namespace gfd

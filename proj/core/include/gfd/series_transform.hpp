#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gfd {

/// A raw vibration window. Values must be finite.
struct RawSeries {
  std::vector<double> values;
  double sample_rate = 0.0;  // Hz, metadata only
};

/// Min-max scaled series; every value lies in [0, 1].
struct ScaledSeries {
  std::vector<double> values;
  double original_min = 0.0;
  double original_max = 0.0;
};

/// Angular/radial polar coordinates of a scaled series.
struct PolarEncoding {
  std::vector<double> phi;     // arccos(x_i), in [0, pi/2] for x in [0, 1]
  std::vector<double> radius;  // i / N for i = 1..N
};

/// Symmetric N x N matrix of pairwise modified inner products.
class GafMatrix {
 public:
  GafMatrix() = default;
  explicit GafMatrix(std::size_t size) : size_(size), entries_(size * size, 0.0) {}

  std::size_t size() const noexcept { return size_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * size_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return entries_[i * size_ + j]; }
  std::span<const double> entries() const noexcept { return entries_; }

 private:
  std::size_t size_ = 0;
  std::vector<double> entries_;
};

/// N x N 8-bit grayscale image, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  explicit GrayImage(std::size_t size, std::uint8_t fill = 0)
      : size_(size), pixels_(size * size, fill) {}

  std::size_t size() const noexcept { return size_; }
  std::uint8_t operator()(std::size_t row, std::size_t col) const { return pixels_[row * size_ + col]; }
  std::uint8_t& operator()(std::size_t row, std::size_t col) { return pixels_[row * size_ + col]; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Affine map min -> 0, max -> 1. Throws ConstantSeries when max == min.
ScaledSeries minmax_scale(std::span<const double> values);
inline ScaledSeries minmax_scale(const RawSeries& series) { return minmax_scale(series.values); }

PolarEncoding polar_encode(const ScaledSeries& scaled);

/// x*y - sqrt(1-x^2)*sqrt(1-y^2), i.e. cos(arccos x + arccos y).
double modified_inner(double x, double y);

/// The part of the modified product that the plain product lacks:
/// -sqrt((1-x^2)(1-y^2)). Always <= 0.
double penalty(double x, double y);

struct PenaltyGradient {
  double d_dx;
  double d_dy;
};

/// Closed-form partial derivatives of penalty() for |x|, |y| < 1.
PenaltyGradient penalty_gradient(double x, double y);

GafMatrix gaf_matrix(const ScaledSeries& scaled);

/// pixel = round(255 * (g + 1) / 2), ties away from zero.
std::uint8_t quantize(double g);
GrayImage to_gray(const GafMatrix& g);

/// Uniform-stride subsample to `target` points (stride = len / target).
std::vector<double> stride_subsample(std::span<const double> values, std::size_t target);

/// scale -> GAF -> gray at exactly target_size x target_size.
GrayImage series_to_image(std::span<const double> values, std::size_t target_size);
inline GrayImage series_to_image(const RawSeries& series, std::size_t target_size) {
  return series_to_image(series.values, target_size);
}

/// Binary PGM ("P5", maxval 255).
std::string encode_pgm(const GrayImage& image);
GrayImage decode_pgm(std::string_view bytes);

/// N rows of N comma-separated reals at round-trip precision.
std::string encode_gaf_csv(const GafMatrix& g);

}  // namespace gfd

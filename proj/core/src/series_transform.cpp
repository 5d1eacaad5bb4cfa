#include "gfd/series_transform.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "gfd/error.hpp"

namespace gfd {
namespace {

void require_unit_interval(double x, const char* what) {
  if (!(x >= -1.0 && x <= 1.0)) {
    fail(ErrorKind::DomainError, std::string(what) + ": operand outside [-1, 1]");
  }
}

}  // namespace

ScaledSeries minmax_scale(std::span<const double> values) {
  if (values.size() < 2) fail(ErrorKind::TooShort, "min-max scaling needs at least 2 samples");
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorKind::DomainError, "series contains a non-finite value");
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) fail(ErrorKind::ConstantSeries, "constant series");

  ScaledSeries out;
  out.original_min = lo;
  out.original_max = hi;
  out.values.reserve(values.size());
  const double range = hi - lo;
  for (double v : values) {
    // Clamp guards against 1 ulp overshoot from the division.
    out.values.push_back(std::clamp((v - lo) / range, 0.0, 1.0));
  }
  return out;
}

PolarEncoding polar_encode(const ScaledSeries& scaled) {
  const std::size_t n = scaled.values.size();
  PolarEncoding enc;
  enc.phi.reserve(n);
  enc.radius.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = scaled.values[i];
    if (!(x >= 0.0 && x <= 1.0)) fail(ErrorKind::DomainError, "scaled value outside [0, 1]");
    enc.phi.push_back(std::acos(x));
    enc.radius.push_back(static_cast<double>(i + 1) / static_cast<double>(n));
  }
  return enc;
}

double modified_inner(double x, double y) {
  require_unit_interval(x, "modified_inner");
  require_unit_interval(y, "modified_inner");
  return x * y - std::sqrt(1.0 - x * x) * std::sqrt(1.0 - y * y);
}

double penalty(double x, double y) {
  require_unit_interval(x, "penalty");
  require_unit_interval(y, "penalty");
  return -std::sqrt((1.0 - x * x) * (1.0 - y * y));
}

PenaltyGradient penalty_gradient(double x, double y) {
  if (!(std::abs(x) < 1.0 && std::abs(y) < 1.0)) {
    fail(ErrorKind::DomainError, "penalty gradient is defined on the open square only");
  }
  const double root = std::sqrt((1.0 - x * x) * (1.0 - y * y));
  return {x * (1.0 - y * y) / root, y * (1.0 - x * x) / root};
}

GafMatrix gaf_matrix(const ScaledSeries& scaled) {
  const std::size_t n = scaled.values.size();
  for (double x : scaled.values) {
    if (!(x >= 0.0 && x <= 1.0)) fail(ErrorKind::DomainError, "scaled value outside [0, 1]");
  }
  GafMatrix g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = modified_inner(scaled.values[i], scaled.values[j]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

std::uint8_t quantize(double g) {
  // std::round rounds half away from zero.
  const double scaled = std::round(255.0 * (g + 1.0) / 2.0);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

GrayImage to_gray(const GafMatrix& g) {
  GrayImage img(g.size());
  auto pixels = img.pixels();
  const auto entries = g.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) pixels[k] = quantize(entries[k]);
  return img;
}

std::vector<double> stride_subsample(std::span<const double> values, std::size_t target) {
  if (values.size() < target) fail(ErrorKind::TooShort, "series shorter than target size");
  if (values.size() == target) return {values.begin(), values.end()};
  const std::size_t stride = values.size() / target;
  std::vector<double> out;
  out.reserve(target);
  for (std::size_t i = 0; i < target; ++i) out.push_back(values[i * stride]);
  return out;
}

GrayImage series_to_image(std::span<const double> values, std::size_t target_size) {
  if (values.size() < target_size) {
    fail(ErrorKind::TooShort, "series length " + std::to_string(values.size()) +
                                  " < image size " + std::to_string(target_size));
  }
  const auto picked = stride_subsample(values, target_size);
  return to_gray(gaf_matrix(minmax_scale(picked)));
}

std::string encode_pgm(const GrayImage& image) {
  const std::string n = std::to_string(image.size());
  std::string out = "P5\n" + n + " " + n + "\n255\n";
  const auto px = image.pixels();
  out.append(reinterpret_cast<const char*>(px.data()), px.size());
  return out;
}

GrayImage decode_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string_view {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  auto to_size = [](std::string_view tok) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      fail(ErrorKind::FormatError, "bad PGM header field");
    }
    return v;
  };
  if (next_token() != "P5") fail(ErrorKind::FormatError, "not a binary PGM");
  const std::size_t width = to_size(next_token());
  const std::size_t height = to_size(next_token());
  const std::size_t maxval = to_size(next_token());
  if (width != height) fail(ErrorKind::FormatError, "PGM image is not square");
  if (maxval != 255) fail(ErrorKind::FormatError, "PGM maxval must be 255");
  ++pos;  // single whitespace after maxval
  if (bytes.size() < pos + width * height) fail(ErrorKind::FormatError, "truncated PGM payload");
  GrayImage img(width);
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), width * height,
              reinterpret_cast<char*>(img.pixels().data()));
  return img;
}

std::string encode_gaf_csv(const GafMatrix& g) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (j) out.push_back(',');
      const auto res = std::to_chars(buf, buf + sizeof buf, g(i, j));
      out.append(buf, res.ptr);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace gfd

#pragma once

#include <charconv>
#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace gfd {

/// Shortest round-trip decimal representation.
inline std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Builds comma-separated tables with a header row.
class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      if (!first) out_.push_back(',');
      out_.append(h);
      first = false;
    }
    out_.push_back('\n');
  }

  template <typename... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    ((append_field(fields, first)), ...);
    out_.push_back('\n');
  }

  const std::string& str() const noexcept { return out_; }

 private:
  template <typename T>
  void append_field(const T& v, bool& first) {
    if (!first) out_.push_back(',');
    first = false;
    if constexpr (std::floating_point<T>) {
      out_ += format_real(v);
    } else if constexpr (std::integral<T>) {
      out_ += std::to_string(v);
    } else {
      out_.append(std::string_view(v));
    }
  }

  std::string out_;
};

}  // namespace gfd

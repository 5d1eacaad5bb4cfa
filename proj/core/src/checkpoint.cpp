#include "gfd/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <map>

#include "gfd/error.hpp"
#include "gfd/io.hpp"

namespace gfd {
namespace {

constexpr std::string_view kMagic = "GFD1";
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.append(buf, sizeof(T));
}

void put_str(std::string& out, std::string_view s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    char buf[sizeof(T)];
    std::memcpy(buf, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
  }

  std::string get_str() {
    const auto len = get<std::uint32_t>();
    need(len);
    std::string s(bytes_.substr(pos_, len));
    pos_ += len;
    return s;
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail(ErrorKind::FormatError, "truncated checkpoint");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::pair<std::string, double>> config_fields(const ModelConfig& c) {
  auto d = [](auto v) { return static_cast<double>(v); };
  return {
      {"series_length", d(c.series_length)},
      {"image_size", d(c.image_size)},
      {"series_channels", d(c.series_channels)},
      {"stem_channels", d(c.stem_channels)},
      {"stage0_channels", d(c.stage_channels[0])},
      {"stage1_channels", d(c.stage_channels[1])},
      {"stage2_channels", d(c.stage_channels[2])},
      {"stage0_mid_channels", d(c.stage_mid_channels[0])},
      {"stage1_mid_channels", d(c.stage_mid_channels[1])},
      {"stage2_mid_channels", d(c.stage_mid_channels[2])},
      {"num_outputs", d(c.num_outputs)},
      {"keep_rate", c.keep_rate},
      {"variant", d(static_cast<int>(c.variant))},
  };
}

ModelConfig config_from_fields(const std::map<std::string, double>& f) {
  auto get = [&](const char* key) {
    auto it = f.find(key);
    if (it == f.end()) fail(ErrorKind::FormatError, std::string("checkpoint lacks config field ") + key);
    return it->second;
  };
  auto sz = [&](const char* key) { return static_cast<std::size_t>(get(key)); };
  ModelConfig c;
  c.series_length = sz("series_length");
  c.image_size = sz("image_size");
  c.series_channels = sz("series_channels");
  c.stem_channels = sz("stem_channels");
  c.stage_channels = {sz("stage0_channels"), sz("stage1_channels"), sz("stage2_channels")};
  c.stage_mid_channels = {sz("stage0_mid_channels"), sz("stage1_mid_channels"), sz("stage2_mid_channels")};
  c.num_outputs = sz("num_outputs");
  c.keep_rate = get("keep_rate");
  const int v = static_cast<int>(get("variant"));
  if (v < 0 || v > static_cast<int>(Variant::TrunkOnly)) fail(ErrorKind::FormatError, "bad variant");
  c.variant = static_cast<Variant>(v);
  return c;
}

void put_tensor(std::string& out, const std::string& name, std::uint8_t kind, const Tensor& t) {
  put_str(out, name);
  put<std::uint8_t>(out, kind);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
  for (auto d : t.shape()) put<std::uint64_t>(out, d);
  for (double v : t.data()) put<double>(out, v);
}

}  // namespace

std::string encode_checkpoint(FusionModel& model) {
  std::string out(kMagic);
  put<std::uint32_t>(out, kVersion);
  const auto fields = config_fields(model.config());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(fields.size()));
  for (const auto& [k, v] : fields) {
    put_str(out, k);
    put<double>(out, v);
  }
  const auto refs = model.state();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(refs.params.size() + refs.buffers.size()));
  for (const auto& p : refs.params) put_tensor(out, p.name, 0, p.param->value);
  for (const auto& b : refs.buffers) put_tensor(out, b.name, 1, *b.tensor);
  return out;
}

FusionModel decode_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(kMagic.size()) != kMagic) fail(ErrorKind::FormatError, "bad checkpoint magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) fail(ErrorKind::FormatError, "unsupported checkpoint version " + std::to_string(version));
  std::map<std::string, double> fields;
  const auto n_fields = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_fields; ++i) {
    auto key = r.get_str();
    fields[key] = r.get<double>();
  }
  FusionModel model(config_from_fields(fields));
  auto refs = model.state();
  std::map<std::string, Tensor*> targets;
  for (auto& p : refs.params) targets[p.name] = &p.param->value;
  for (auto& b : refs.buffers) targets[b.name] = b.tensor;

  const auto n_entries = r.get<std::uint32_t>();
  if (n_entries != targets.size()) fail(ErrorKind::FormatError, "checkpoint entry count does not match model");
  for (std::uint32_t i = 0; i < n_entries; ++i) {
    const auto name = r.get_str();
    r.get<std::uint8_t>();
    const auto rank = r.get<std::uint32_t>();
    std::vector<std::size_t> shape;
    for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(static_cast<std::size_t>(r.get<std::uint64_t>()));
    auto it = targets.find(name);
    if (it == targets.end()) fail(ErrorKind::FormatError, "unknown checkpoint entry " + name);
    if (it->second->shape() != shape) {
      fail(ErrorKind::FormatError, "shape mismatch for " + name + ": " + shape_string(shape));
    }
    for (double& v : it->second->data()) v = r.get<double>();
  }
  if (!r.done()) fail(ErrorKind::FormatError, "trailing bytes after checkpoint");
  return model;
}

void save_checkpoint(FusionModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, encode_checkpoint(model));
}

FusionModel load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

}  // namespace gfd

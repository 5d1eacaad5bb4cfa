#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gfd/fusion_model.hpp"

namespace gfd {

// Binary layout, all integers and reals little-endian:
//   "GFD1"                         magic
//   u32 version (= 1)
//   u32 field_count, then field_count x (str key, f64 value)   model config
//   u32 entry_count, then per entry:
//     str name, u8 kind (0 parameter, 1 buffer), u32 rank, rank x u64 dims,
//     product(dims) x f64
// where str = u32 byte length + bytes.
std::string encode_checkpoint(FusionModel& model);
FusionModel decode_checkpoint(std::string_view bytes);

void save_checkpoint(FusionModel& model, const std::filesystem::path& path);
FusionModel load_checkpoint(const std::filesystem::path& path);

}  // namespace gfd

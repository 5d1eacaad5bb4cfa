#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace gfd {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over the target so a
/// failed run never leaves a half-written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// 64-bit FNV-1a, used for config hashes and artifact checksums.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

std::string hex64(std::uint64_t v);

}  // namespace gfd

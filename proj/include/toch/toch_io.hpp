#pragma once

#include "toch/toch_field.hpp"

#include <filesystem>
#include <string>

namespace toch {

inline constexpr std::uint32_t kTochFormatVersion = 1;

/// Little-endian binary layout:
///   "TOCH" | u32 version | u32 T | u32 N | u64 seed
///   T x N x (u8 c, f32 d, f32 y[3])
///   N x (f32 point[3], f32 normal[3])
std::string encode_toch(const TochSequence& seq);
TochSequence decode_toch(const std::string& bytes, const std::string& source = "<bytes>");

void write_toch(const std::filesystem::path& path, const TochSequence& seq);
TochSequence read_toch(const std::filesystem::path& path);

}  // namespace toch

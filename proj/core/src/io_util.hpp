#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "salrate/error.hpp"

namespace salrate::detail {

// Dimension caps shared by the binary readers so hostile headers cannot
// request unbounded allocations.
inline constexpr long kMaxDim = 65536;
inline constexpr long long kMaxPixels = 1LL << 26;
inline constexpr long kMaxFrames = 1000000;

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IO_FAILURE, "cannot open " + path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IO_FAILURE, "cannot open " + path.string());
  return out;
}

inline bool parse_long(std::string_view text, long& value) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end;
}

inline bool parse_double(std::string_view text, double& value) {
  if (text.empty()) return false;
  std::string buf(text);
  char* end = nullptr;
  value = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size();
}

inline std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace salrate::detail

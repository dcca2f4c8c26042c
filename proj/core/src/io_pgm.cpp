#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "io_util.hpp"
#include "salrate/io.hpp"

namespace salrate {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      while (in.get(c) && c != '\n') {
      }
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(c);
    if (token.size() > 32) fail(ErrorCode::MALFORMED_HEADER, "oversized header token");
  }
  return token;
}

long header_number(std::istream& in, const char* what) {
  std::string token = next_token(in);
  long value = -1;
  if (token.empty() || !detail::parse_long(token, value)) {
    fail(ErrorCode::MALFORMED_HEADER, std::string("bad ") + what + " field");
  }
  return value;
}

}  // namespace

SaliencyMap read_pgm(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '5') {
    fail(ErrorCode::MALFORMED_HEADER, "not a binary PGM (P5) file");
  }
  long width = header_number(in, "width");
  long height = header_number(in, "height");
  long maxval = header_number(in, "maxval");
  if (width <= 0 || height <= 0 || width > detail::kMaxDim ||
      height > detail::kMaxDim || width * height > detail::kMaxPixels) {
    fail(ErrorCode::MALFORMED_HEADER, "unsupported PGM dimensions");
  }
  if (maxval != 255 && maxval != 65535) {
    fail(ErrorCode::MALFORMED_HEADER, "maxval " + std::to_string(maxval) + " (expected 255 or 65535)");
  }
  // The single whitespace byte after maxval was consumed by the tokenizer.

  const size_t count = static_cast<size_t>(width) * height;
  const size_t bytes = count * (maxval == 255 ? 1 : 2);
  std::vector<uint8_t> raw(bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<size_t>(in.gcount()) != bytes) {
    fail(ErrorCode::TRUNCATED_PAYLOAD, "PGM payload short");
  }

  SaliencyMap map(static_cast<int>(width), static_cast<int>(height));
  const double scale = 1.0 / static_cast<double>(maxval);
  if (maxval == 255) {
    for (size_t i = 0; i < count; ++i) map.values[i] = raw[i] * scale;
  } else {
    for (size_t i = 0; i < count; ++i) {
      map.values[i] = ((raw[2 * i] << 8) | raw[2 * i + 1]) * scale;  // MSB first
    }
  }
  return map;
}

SaliencyMap read_pgm(const std::filesystem::path& path) {
  std::ifstream in = detail::open_input(path);
  return read_pgm(in);
}

void write_pgm(const SaliencyMap& map, std::ostream& out, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    fail(ErrorCode::OUT_OF_RANGE, "bit depth must be 8 or 16");
  }
  if (map.width <= 0 || map.height <= 0) {
    fail(ErrorCode::DIMENSION_MISMATCH, "map dimensions must be positive");
  }
  double peak = 0.0;
  for (double v : map.values) {
    if (!std::isfinite(v)) fail(ErrorCode::OUT_OF_RANGE, "non-finite map value");
    peak = std::max(peak, v);
  }
  const double scale = peak > 1.0 ? 1.0 / peak : 1.0;
  const long maxval = bit_depth == 8 ? 255 : 65535;

  out << "P5\n" << map.width << " " << map.height << "\n" << maxval << "\n";
  std::vector<uint8_t> raw;
  raw.reserve(map.pixel_count() * (bit_depth == 8 ? 1 : 2));
  for (double v : map.values) {
    long q = static_cast<long>(std::floor(std::max(v, 0.0) * scale * maxval + 0.5));
    q = std::clamp(q, 0L, maxval);
    if (bit_depth == 16) raw.push_back(static_cast<uint8_t>(q >> 8));
    raw.push_back(static_cast<uint8_t>(q & 0xFF));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) fail(ErrorCode::IO_FAILURE, "PGM write failed");
}

void write_pgm(const SaliencyMap& map, const std::filesystem::path& path, int bit_depth) {
  std::ofstream out = detail::open_output(path);
  write_pgm(map, out, bit_depth);
}

}  // namespace salrate

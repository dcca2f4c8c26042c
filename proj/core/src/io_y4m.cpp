#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "io_util.hpp"
#include "salrate/io.hpp"

namespace salrate {

namespace {

constexpr char kSignature[] = "YUV4MPEG2";

struct StreamLayout {
  int width = 0;
  int height = 0;
  size_t chroma_bytes = 0;  // per frame, skipped on read
};

// Chroma plane bytes for 4:2:0. Ceil division keeps odd sizes readable.
size_t chroma_420_bytes(long w, long h) {
  return 2 * static_cast<size_t>((w + 1) / 2) * static_cast<size_t>((h + 1) / 2);
}

StreamLayout parse_stream_header(const std::string& line) {
  StreamLayout layout;
  long width = -1;
  long height = -1;
  std::string colorspace = "420";

  std::istringstream tokens(line);
  std::string token;
  tokens >> token;  // signature, already checked
  while (tokens >> token) {
    if (token.empty()) continue;
    switch (token[0]) {
      case 'W':
        if (!detail::parse_long(std::string_view(token).substr(1), width)) {
          fail(ErrorCode::MALFORMED_HEADER, "bad width token '" + token + "'");
        }
        break;
      case 'H':
        if (!detail::parse_long(std::string_view(token).substr(1), height)) {
          fail(ErrorCode::MALFORMED_HEADER, "bad height token '" + token + "'");
        }
        break;
      case 'C':
        colorspace = token.substr(1);
        break;
      default:
        break;  // F/I/A/X parameters do not affect the luma layout
    }
  }

  if (width <= 0 || height <= 0) {
    fail(ErrorCode::MALFORMED_HEADER, "missing or non-positive dimensions");
  }
  if (width > detail::kMaxDim || height > detail::kMaxDim ||
      width * height > detail::kMaxPixels) {
    fail(ErrorCode::MALFORMED_HEADER, "frame dimensions exceed supported limits");
  }

  if (colorspace == "mono") {
    layout.chroma_bytes = 0;
  } else if (colorspace == "420" || colorspace == "420jpeg" ||
             colorspace == "420mpeg2" || colorspace == "420paldv") {
    layout.chroma_bytes = chroma_420_bytes(width, height);
  } else {
    fail(ErrorCode::UNSUPPORTED_COLORSPACE, "colorspace C" + colorspace);
  }
  layout.width = static_cast<int>(width);
  layout.height = static_cast<int>(height);
  return layout;
}

bool read_line(std::istream& in, std::string& line, size_t max_len) {
  line.clear();
  char c;
  while (in.get(c)) {
    if (c == '\n') return true;
    line.push_back(c);
    if (line.size() > max_len) {
      fail(ErrorCode::MALFORMED_HEADER, "header line exceeds " + std::to_string(max_len) + " bytes");
    }
  }
  return false;  // EOF before newline
}

}  // namespace

VideoSequence read_y4m(std::istream& in) {
  std::string line;
  if (!read_line(in, line, 4096)) {
    fail(ErrorCode::MALFORMED_HEADER, "missing stream header line");
  }
  if (line.compare(0, std::strlen(kSignature), kSignature) != 0) {
    fail(ErrorCode::MALFORMED_HEADER, "missing YUV4MPEG2 signature");
  }
  StreamLayout layout = parse_stream_header(line);

  VideoSequence seq;
  seq.width = layout.width;
  seq.height = layout.height;
  const size_t luma_bytes = static_cast<size_t>(layout.width) * layout.height;

  while (true) {
    if (in.peek() == std::char_traits<char>::eof()) break;
    if (!read_line(in, line, 4096)) {
      fail(ErrorCode::MALFORMED_HEADER, "truncated FRAME marker");
    }
    if (line.compare(0, 5, "FRAME") != 0) {
      fail(ErrorCode::MALFORMED_HEADER, "expected FRAME marker, got '" + line.substr(0, 16) + "'");
    }
    std::vector<uint8_t> plane(luma_bytes);
    in.read(reinterpret_cast<char*>(plane.data()), static_cast<std::streamsize>(luma_bytes));
    if (static_cast<size_t>(in.gcount()) != luma_bytes) {
      fail(ErrorCode::TRUNCATED_FRAME,
           "frame " + std::to_string(seq.frames.size()) + " luma plane short");
    }
    if (layout.chroma_bytes > 0) {
      in.ignore(static_cast<std::streamsize>(layout.chroma_bytes));
      if (static_cast<size_t>(in.gcount()) != layout.chroma_bytes) {
        fail(ErrorCode::TRUNCATED_FRAME,
             "frame " + std::to_string(seq.frames.size()) + " chroma planes short");
      }
    }
    seq.frames.push_back(std::move(plane));
  }
  return seq;
}

VideoSequence read_y4m(const std::filesystem::path& path) {
  std::ifstream in = detail::open_input(path);
  return read_y4m(in);
}

void write_y4m(const VideoSequence& seq, std::ostream& out) {
  if (seq.width <= 0 || seq.height <= 0) {
    fail(ErrorCode::DIMENSION_MISMATCH, "video dimensions must be positive");
  }
  const size_t luma_bytes = static_cast<size_t>(seq.width) * seq.height;
  out << "YUV4MPEG2 W" << seq.width << " H" << seq.height << " F25:1 Ip A1:1 Cmono\n";
  for (const auto& frame : seq.frames) {
    if (frame.size() != luma_bytes) {
      fail(ErrorCode::DIMENSION_MISMATCH, "frame size does not match video dimensions");
    }
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(frame.data()),
              static_cast<std::streamsize>(frame.size()));
  }
  if (!out) fail(ErrorCode::IO_FAILURE, "y4m write failed");
}

void write_y4m(const VideoSequence& seq, const std::filesystem::path& path) {
  std::ofstream out = detail::open_output(path);
  write_y4m(seq, out);
}

}  // namespace salrate

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "io_util.hpp"
#include "salrate/io.hpp"

namespace salrate {

void write_qpmap(const std::vector<QpMap>& maps, std::ostream& out) {
  if (maps.empty()) fail(ErrorCode::DIMENSION_MISMATCH, "empty map list");
  const QpMap& first = maps.front();
  if (first.mb_width <= 0 || first.mb_height <= 0) {
    fail(ErrorCode::DIMENSION_MISMATCH, "macroblock dimensions must be positive");
  }
  for (const QpMap& m : maps) {
    if (!m.same_size(first)) fail(ErrorCode::DIMENSION_MISMATCH, "maps differ in dimensions");
    for (int q : m.qp) {
      if (q < kMinQp || q > kMaxQp) {
        fail(ErrorCode::OUT_OF_RANGE, "qp " + std::to_string(q) + " outside [0, 51]");
      }
    }
  }

  out << "QPMAP v1 " << first.mb_width << " " << first.mb_height << " " << maps.size() << "\n";
  for (const QpMap& m : maps) {
    for (int y = 0; y < m.mb_height; ++y) {
      for (int x = 0; x < m.mb_width; ++x) {
        if (x > 0) out << ' ';
        out << m.at(x, y);
      }
      out << '\n';
    }
  }
  if (!out) fail(ErrorCode::IO_FAILURE, "qpmap write failed");
}

void write_qpmap(const std::vector<QpMap>& maps, const std::filesystem::path& path) {
  std::ofstream out = detail::open_output(path);
  write_qpmap(maps, out);
}

std::vector<QpMap> read_qpmap(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::VERSION_MISMATCH, "missing QPMAP header");
  std::istringstream header(std::string(detail::trim_cr(line)));
  std::string magic;
  std::string version;
  long mb_width = 0;
  long mb_height = 0;
  long frames = 0;
  header >> magic >> version >> mb_width >> mb_height >> frames;
  if (header.fail() || magic != "QPMAP") {
    fail(ErrorCode::VERSION_MISMATCH, "not a QPMAP file");
  }
  if (version != "v1") fail(ErrorCode::VERSION_MISMATCH, "unsupported version '" + version + "'");
  if (mb_width <= 0 || mb_height <= 0 || frames <= 0 || mb_width > detail::kMaxDim ||
      mb_height > detail::kMaxDim || frames > detail::kMaxFrames ||
      mb_width * mb_height > detail::kMaxPixels) {
    fail(ErrorCode::DIMENSION_MISMATCH, "implausible QPMAP dimensions");
  }

  std::vector<QpMap> maps;
  maps.reserve(static_cast<size_t>(frames));
  for (long f = 0; f < frames; ++f) {
    QpMap map(static_cast<int>(mb_width), static_cast<int>(mb_height));
    for (long y = 0; y < mb_height; ++y) {
      if (!std::getline(in, line)) {
        fail(ErrorCode::DIMENSION_MISMATCH,
             "frame " + std::to_string(f) + ": expected " + std::to_string(mb_height) + " rows");
      }
      std::istringstream row(std::string(detail::trim_cr(line)));
      for (long x = 0; x < mb_width; ++x) {
        long q = 0;
        if (!(row >> q)) {
          fail(ErrorCode::DIMENSION_MISMATCH,
               "frame " + std::to_string(f) + " row " + std::to_string(y) + ": short row");
        }
        if (q < kMinQp || q > kMaxQp) {
          fail(ErrorCode::OUT_OF_RANGE, "qp " + std::to_string(q) + " outside [0, 51]");
        }
        map.at(static_cast<int>(x), static_cast<int>(y)) = static_cast<int>(q);
      }
      long extra = 0;
      if (row >> extra) {
        fail(ErrorCode::DIMENSION_MISMATCH,
             "frame " + std::to_string(f) + " row " + std::to_string(y) + ": excess values");
      }
    }
    maps.push_back(std::move(map));
  }
  return maps;
}

std::vector<QpMap> read_qpmap(const std::filesystem::path& path) {
  std::ifstream in = detail::open_input(path);
  return read_qpmap(in);
}

}  // namespace salrate

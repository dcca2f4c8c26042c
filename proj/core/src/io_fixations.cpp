#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "io_util.hpp"
#include "salrate/io.hpp"

namespace salrate {

namespace {

constexpr char kHeader[] = "frame,observer,x,y";

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

FixationSet read_fixations_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorCode::MISSING_HEADER, "empty file, expected header '" + std::string(kHeader) + "'");
  }
  if (detail::trim_cr(line) != kHeader) {
    fail(ErrorCode::MISSING_HEADER, "expected header '" + std::string(kHeader) + "'");
  }

  FixationSet fix;
  int row = 0;
  while (std::getline(in, line)) {
    std::string_view body = detail::trim_cr(line);
    ++row;
    if (body.empty()) continue;
    auto fields = split(body, ',');
    long frame = 0;
    long observer = 0;
    double x = 0.0;
    double y = 0.0;
    bool ok = fields.size() == 4 && detail::parse_long(fields[0], frame) &&
              detail::parse_long(fields[1], observer) &&
              detail::parse_double(fields[2], x) && detail::parse_double(fields[3], y) &&
              frame >= 0 && std::isfinite(x) && std::isfinite(y);
    if (!ok) fail(ErrorCode::BAD_ROW, "row " + std::to_string(row));
    fix.records.push_back({static_cast<int>(frame), static_cast<int>(observer), x, y});
  }
  return fix;
}

FixationSet read_fixations_csv(const std::filesystem::path& path) {
  std::ifstream in = detail::open_input(path);
  return read_fixations_csv(in);
}

void write_fixations_csv(const FixationSet& fix, std::ostream& out) {
  out << kHeader << "\n";
  char buf[128];
  for (const Fixation& f : fix.records) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g\n", f.frame, f.observer, f.x, f.y);
    out << buf;
  }
  if (!out) fail(ErrorCode::IO_FAILURE, "fixation CSV write failed");
}

void write_fixations_csv(const FixationSet& fix, const std::filesystem::path& path) {
  std::ofstream out = detail::open_output(path);
  write_fixations_csv(fix, out);
}

}  // namespace salrate

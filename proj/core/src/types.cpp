#include "salrate/types.hpp"

#include "salrate/error.hpp"

namespace salrate {

FixationSet filter_to_bounds(const FixationSet& fix, int width, int height) {
  FixationSet out;
  out.records.reserve(fix.records.size());
  for (const Fixation& f : fix.records) {
    if (f.x >= 0.0 && f.x < width && f.y >= 0.0 && f.y < height) {
      out.records.push_back(f);
    }
  }
  return out;
}

int mb_count_for(int pixels) {
  return (pixels + kMacroblockSize - 1) / kMacroblockSize;
}

QpMap uniform_qp_map(int width, int height, int qp) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::DIMENSION_MISMATCH, "frame dimensions must be positive");
  }
  if (qp < kMinQp || qp > kMaxQp) {
    fail(ErrorCode::OUT_OF_RANGE, "qp " + std::to_string(qp) + " outside [0, 51]");
  }
  return QpMap(mb_count_for(width), mb_count_for(height), qp);
}

}  // namespace salrate

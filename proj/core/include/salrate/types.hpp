#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace salrate {

inline constexpr int kMacroblockSize = 16;
inline constexpr int kMinQp = 0;
inline constexpr int kMaxQp = 51;

/// Row-major grid of per-pixel real values. Saliency maps are nonnegative;
/// z-scored maps reuse the same storage but may carry negative values.
struct PixelMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  PixelMap() = default;
  PixelMap(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

  double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
  size_t pixel_count() const { return values.size(); }
  bool same_size(const PixelMap& other) const {
    return width == other.width && height == other.height;
  }
};

using SaliencyMap = PixelMap;

/// Luma-only video: chroma is dropped at ingest, every frame is a
/// width*height plane of 8-bit samples in row-major order.
struct VideoSequence {
  int width = 0;
  int height = 0;
  std::vector<std::vector<uint8_t>> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }
};

struct Fixation {
  int frame = 0;
  int observer = 0;
  double x = 0.0;
  double y = 0.0;
};

struct FixationSet {
  std::vector<Fixation> records;
};

/// Drops records whose coordinates fall outside [0,width) x [0,height).
FixationSet filter_to_bounds(const FixationSet& fix, int width, int height);

/// Per-macroblock integer quantizers, row-major over the macroblock grid.
struct QpMap {
  int mb_width = 0;
  int mb_height = 0;
  std::vector<int> qp;

  QpMap() = default;
  QpMap(int mbw, int mbh, int fill = 0)
      : mb_width(mbw), mb_height(mbh),
        qp(static_cast<size_t>(mbw) * mbh, fill) {}

  int& at(int mx, int my) { return qp[static_cast<size_t>(my) * mb_width + mx]; }
  int at(int mx, int my) const { return qp[static_cast<size_t>(my) * mb_width + mx]; }
  size_t block_count() const { return qp.size(); }
  bool same_size(const QpMap& other) const {
    return mb_width == other.mb_width && mb_height == other.mb_height;
  }
};

/// Macroblock grid dimensions for a pixel frame (partial edge blocks count).
int mb_count_for(int pixels);

/// Uniform map covering a width x height frame.
QpMap uniform_qp_map(int width, int height, int qp);

enum class Outcome { A_WINS, B_WINS, TIE };

/// One pairwise subjective judgment.
struct ComparisonRecord {
  std::string item_id;
  std::string method_a;
  std::string method_b;
  Outcome outcome = Outcome::TIE;
  std::string participant_id;
};

}  // namespace salrate

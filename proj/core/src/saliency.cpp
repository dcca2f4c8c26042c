#include "salrate/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "salrate/error.hpp"

namespace salrate {

namespace {

void max_normalize_in_place(PixelMap& map) {
  double peak = 0.0;
  for (double v : map.values) peak = std::max(peak, v);
  if (peak > 0.0) {
    const double inv = 1.0 / peak;
    for (double& v : map.values) v *= inv;
  }
}

}  // namespace

SaliencyMap fixations_to_map(const FixationSet& fix, int frame, int width,
                             int height, const GaussianKernelSpec& kernel) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::OUT_OF_RANGE, "map dimensions must be positive");
  }
  if (!(kernel.sigma > 0.0)) fail(ErrorCode::OUT_OF_RANGE, "sigma must be positive");

  std::vector<Fixation> points;
  for (const Fixation& f : fix.records) {
    if (f.frame == frame && f.x >= 0.0 && f.x < width && f.y >= 0.0 && f.y < height) {
      points.push_back(f);
    }
  }
  // Canonical accumulation order makes the sum independent of record order.
  std::sort(points.begin(), points.end(), [](const Fixation& a, const Fixation& b) {
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });

  SaliencyMap map(width, height);
  const double sigma = kernel.sigma;
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
  const double radius = 4.0 * sigma;

  std::vector<double> col_factor;
  std::vector<double> row_factor;
  for (const Fixation& f : points) {
    const int x0 = std::max(0, static_cast<int>(std::ceil(f.x - radius)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(f.x + radius)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(f.y - radius)));
    const int y1 = std::min(height - 1, static_cast<int>(std::floor(f.y + radius)));

    col_factor.resize(static_cast<size_t>(x1 - x0 + 1));
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - f.x;
      col_factor[static_cast<size_t>(x - x0)] = std::exp(-dx * dx * inv_two_sigma2);
    }
    row_factor.resize(static_cast<size_t>(y1 - y0 + 1));
    for (int y = y0; y <= y1; ++y) {
      const double dy = y - f.y;
      row_factor[static_cast<size_t>(y - y0)] = std::exp(-dy * dy * inv_two_sigma2);
    }

    for (int y = y0; y <= y1; ++y) {
      const double fy = row_factor[static_cast<size_t>(y - y0)];
      double* row = &map.values[static_cast<size_t>(y) * width];
      for (int x = x0; x <= x1; ++x) {
        row[x] += fy * col_factor[static_cast<size_t>(x - x0)];
      }
    }
  }

  max_normalize_in_place(map);
  return map;
}

SaliencyMap single_observer_map(const FixationSet& fix, int observer_id, int frame,
                                int width, int height, const GaussianKernelSpec& kernel) {
  FixationSet subset;
  bool seen = false;
  for (const Fixation& f : fix.records) {
    if (f.observer == observer_id) {
      seen = true;
      subset.records.push_back(f);
    }
  }
  if (!seen) {
    fail(ErrorCode::UNKNOWN_OBSERVER, "observer " + std::to_string(observer_id));
  }
  return fixations_to_map(subset, frame, width, height, kernel);
}

SaliencyMap center_prior(int width, int height, double sigma_x_frac, double sigma_y_frac) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::OUT_OF_RANGE, "map dimensions must be positive");
  }
  if (!(sigma_x_frac > 0.0) || !(sigma_y_frac > 0.0)) {
    fail(ErrorCode::OUT_OF_RANGE, "sigma fractions must be positive");
  }
  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;
  const double sx = sigma_x_frac * width;
  const double sy = sigma_y_frac * height;
  const double inv_two_sx2 = 1.0 / (2.0 * sx * sx);
  const double inv_two_sy2 = 1.0 / (2.0 * sy * sy);

  SaliencyMap map(width, height);
  for (int y = 0; y < height; ++y) {
    const double dy = y - cy;
    const double ey = dy * dy * inv_two_sy2;
    for (int x = 0; x < width; ++x) {
      const double dx = x - cx;
      map.at(x, y) = std::exp(-(dx * dx * inv_two_sx2 + ey));
    }
  }
  max_normalize_in_place(map);
  return map;
}

PercentileSplit percentile(const PixelMap& map, double p) {
  if (map.pixel_count() == 0) fail(ErrorCode::EMPTY_MAP, "percentile of empty map");
  if (!(p > 0.0) || !(p < 100.0)) {
    fail(ErrorCode::OUT_OF_RANGE, "percentile must be in (0, 100)");
  }
  const size_t n = map.pixel_count();
  // ceil-rank: index ceil(p/100 * n) - 1. The product is formed before the
  // division so integer percentiles of round counts stay exact.
  double rank = std::ceil(p * static_cast<double>(n) / 100.0);
  size_t index = rank <= 1.0 ? 0 : static_cast<size_t>(rank) - 1;
  index = std::min(index, n - 1);

  std::vector<double> work(map.values);
  std::nth_element(work.begin(), work.begin() + static_cast<ptrdiff_t>(index), work.end());
  return PercentileSplit{work[index], p};
}

PixelMap normalize(const PixelMap& map, NormalizeMode mode) {
  if (map.pixel_count() == 0) fail(ErrorCode::EMPTY_MAP, "normalize of empty map");
  PixelMap out = map;
  switch (mode) {
    case NormalizeMode::MAX_ONE: {
      double peak = *std::max_element(out.values.begin(), out.values.end());
      if (!(peak > 0.0)) fail(ErrorCode::DEGENERATE_MAP, "max-normalize needs a positive maximum");
      for (double& v : out.values) v /= peak;
      return out;
    }
    case NormalizeMode::SUM_ONE: {
      double sum = 0.0;
      for (double v : out.values) sum += v;
      if (!(sum > 0.0)) fail(ErrorCode::DEGENERATE_MAP, "sum-normalize needs a positive sum");
      for (double& v : out.values) v /= sum;
      return out;
    }
    case NormalizeMode::Z_SCORE: {
      const double n = static_cast<double>(out.pixel_count());
      double mean = 0.0;
      for (double v : out.values) mean += v;
      mean /= n;
      double var = 0.0;
      for (double v : out.values) var += (v - mean) * (v - mean);
      var /= n;  // population variance
      if (!(var > 0.0)) fail(ErrorCode::DEGENERATE_MAP, "z-score needs a non-constant map");
      const double inv_std = 1.0 / std::sqrt(var);
      for (double& v : out.values) v = (v - mean) * inv_std;
      return out;
    }
  }
  fail(ErrorCode::OUT_OF_RANGE, "unknown normalize mode");
}

}  // namespace salrate

#include "salrate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "salrate/error.hpp"
#include "salrate/parallel.hpp"

namespace salrate {

namespace {

constexpr double kKlEpsilon = 1e-12;

void require_same_size(const PixelMap& a, const PixelMap& b) {
  if (!a.same_size(b)) fail(ErrorCode::DIMENSION_MISMATCH, "maps differ in dimensions");
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // population
};

Moments moments(const PixelMap& m) {
  const double n = static_cast<double>(m.pixel_count());
  Moments out;
  for (double v : m.values) out.mean += v;
  out.mean /= n;
  for (double v : m.values) out.var += (v - out.mean) * (v - out.mean);
  out.var /= n;
  return out;
}

// Round-half-up pixel index for a fixation coordinate, clamped into range.
int fixation_pixel(double coord, int limit) {
  int p = static_cast<int>(std::floor(coord + 0.5));
  return std::min(std::max(p, 0), limit - 1);
}

std::vector<std::pair<int, int>> fixation_pixels(const PixelMap& pred,
                                                 const FixationSet& fixations, int frame) {
  std::vector<std::pair<int, int>> pixels;
  for (const Fixation& f : fixations.records) {
    if (f.frame != frame) continue;
    if (f.x < 0.0 || f.x >= pred.width || f.y < 0.0 || f.y >= pred.height) continue;
    pixels.emplace_back(fixation_pixel(f.x, pred.width), fixation_pixel(f.y, pred.height));
  }
  return pixels;
}

}  // namespace

double cc(const PixelMap& pred, const PixelMap& gt) {
  require_same_size(pred, gt);
  if (pred.pixel_count() == 0) fail(ErrorCode::EMPTY_MAP, "cc of empty maps");
  Moments mp = moments(pred);
  Moments mg = moments(gt);
  if (!(mp.var > 0.0) || !(mg.var > 0.0)) {
    fail(ErrorCode::DEGENERATE_MAP, "cc requires non-constant maps");
  }
  double cov = 0.0;
  for (size_t i = 0; i < pred.values.size(); ++i) {
    cov += (pred.values[i] - mp.mean) * (gt.values[i] - mg.mean);
  }
  cov /= static_cast<double>(pred.pixel_count());
  return cov / std::sqrt(mp.var * mg.var);
}

double kl_div(const PixelMap& pred, const PixelMap& gt) {
  require_same_size(pred, gt);
  if (pred.pixel_count() == 0) fail(ErrorCode::EMPTY_MAP, "kl of empty maps");
  double gt_sum = 0.0;
  for (double v : gt.values) gt_sum += v;
  if (!(gt_sum > 0.0)) fail(ErrorCode::DEGENERATE_MAP, "kl requires positive ground-truth sum");
  double pred_sum = 0.0;
  for (double v : pred.values) pred_sum += v;

  const double n = static_cast<double>(pred.pixel_count());
  const double pred_scale = pred_sum > 0.0 ? 1.0 / pred_sum : 0.0;
  const double renorm = 1.0 + n * kKlEpsilon;
  double kl = 0.0;
  for (size_t i = 0; i < pred.values.size(); ++i) {
    const double g = gt.values[i] / gt_sum;
    if (g <= 0.0) continue;
    const double q = (pred.values[i] * pred_scale + kKlEpsilon) / renorm;
    kl += g * std::log(g / q);
  }
  return kl;
}

double nss(const PixelMap& pred, const FixationSet& fixations, int frame) {
  if (pred.pixel_count() == 0) fail(ErrorCode::EMPTY_MAP, "nss of empty map");
  Moments m = moments(pred);
  if (!(m.var > 0.0)) fail(ErrorCode::DEGENERATE_MAP, "nss requires a non-constant map");
  auto pixels = fixation_pixels(pred, fixations, frame);
  if (pixels.empty()) {
    fail(ErrorCode::NO_FIXATIONS, "no fixations in frame " + std::to_string(frame));
  }
  const double inv_std = 1.0 / std::sqrt(m.var);
  double sum = 0.0;
  for (auto [x, y] : pixels) sum += (pred.at(x, y) - m.mean) * inv_std;
  return sum / static_cast<double>(pixels.size());
}

double sim(const PixelMap& pred, const PixelMap& gt) {
  require_same_size(pred, gt);
  if (pred.pixel_count() == 0) fail(ErrorCode::EMPTY_MAP, "sim of empty maps");
  double sp = 0.0;
  double sg = 0.0;
  for (double v : pred.values) sp += v;
  for (double v : gt.values) sg += v;
  if (!(sp > 0.0) || !(sg > 0.0)) {
    fail(ErrorCode::DEGENERATE_MAP, "sim requires positive sums");
  }
  double intersection = 0.0;
  for (size_t i = 0; i < pred.values.size(); ++i) {
    intersection += std::min(pred.values[i] / sp, gt.values[i] / sg);
  }
  return intersection;
}

double auc_judd(const PixelMap& pred, const FixationSet& fixations, int frame) {
  if (pred.pixel_count() == 0) fail(ErrorCode::EMPTY_MAP, "auc of empty map");
  auto pixels = fixation_pixels(pred, fixations, frame);
  if (pixels.empty()) {
    fail(ErrorCode::NO_FIXATIONS, "no fixations in frame " + std::to_string(frame));
  }

  std::vector<double> positives;
  positives.reserve(pixels.size());
  for (auto [x, y] : pixels) positives.push_back(pred.at(x, y));
  std::sort(positives.begin(), positives.end());

  std::vector<double> thresholds(positives);
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::vector<double> all(pred.values);
  std::sort(all.begin(), all.end());

  const double n_fix = static_cast<double>(positives.size());
  const double n_all = static_cast<double>(all.size());

  // Descending thresholds produce ROC points with nondecreasing rates.
  std::vector<std::pair<double, double>> roc;
  roc.reserve(thresholds.size() + 2);
  roc.emplace_back(0.0, 0.0);
  for (auto it = thresholds.rbegin(); it != thresholds.rend(); ++it) {
    const double t = *it;
    const double tp =
        static_cast<double>(positives.end() -
                            std::lower_bound(positives.begin(), positives.end(), t));
    const double fp =
        static_cast<double>(all.end() - std::lower_bound(all.begin(), all.end(), t));
    roc.emplace_back(fp / n_all, tp / n_fix);
  }
  roc.emplace_back(1.0, 1.0);

  double area = 0.0;
  for (size_t i = 1; i < roc.size(); ++i) {
    area += (roc[i].first - roc[i - 1].first) * (roc[i].second + roc[i - 1].second) / 2.0;
  }
  return area;
}

double weighted_ssim(const SsimMap& ssim, const SaliencyMap& weights) {
  if (ssim.width != weights.width || ssim.height != weights.height) {
    fail(ErrorCode::DIMENSION_MISMATCH, "weight map does not match SSIM map");
  }
  double wsum = 0.0;
  double acc = 0.0;
  for (size_t i = 0; i < ssim.values.size(); ++i) {
    wsum += weights.values[i];
    acc += weights.values[i] * ssim.values[i];
  }
  if (!(wsum > 0.0)) fail(ErrorCode::DEGENERATE_MAP, "weight map has no positive mass");
  return acc / wsum;
}

std::vector<double> ewssim_per_frame(const VideoSequence& original,
                                     const VideoSequence& compressed,
                                     const std::vector<SaliencyMap>& weights) {
  if (original.width != compressed.width || original.height != compressed.height ||
      original.frame_count() != compressed.frame_count()) {
    fail(ErrorCode::DIMENSION_MISMATCH, "original and compressed sequences differ");
  }
  if (weights.size() != original.frames.size()) {
    fail(ErrorCode::DIMENSION_MISMATCH, "one weight map per frame required");
  }
  for (const SaliencyMap& w : weights) {
    if (w.width != original.width || w.height != original.height) {
      fail(ErrorCode::DIMENSION_MISMATCH, "weight map dimensions differ from video");
    }
  }

  std::vector<double> per_frame(original.frames.size());
  parallel_for(static_cast<int64_t>(original.frames.size()), [&](int64_t f) {
    SsimMap map = ssim_map(original.frames[static_cast<size_t>(f)],
                           compressed.frames[static_cast<size_t>(f)], original.width,
                           original.height);
    per_frame[static_cast<size_t>(f)] = weighted_ssim(map, weights[static_cast<size_t>(f)]);
  });
  return per_frame;
}

double ewssim(const VideoSequence& original, const VideoSequence& compressed,
              const std::vector<SaliencyMap>& weights) {
  std::vector<double> per_frame = ewssim_per_frame(original, compressed, weights);
  if (per_frame.empty()) fail(ErrorCode::EMPTY_INPUT, "no frames to compare");
  double sum = 0.0;
  for (double v : per_frame) sum += v;
  return sum / static_cast<double>(per_frame.size());
}

std::string metric_report_csv_row(const std::string& model, const MetricReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f,%.6f", model.c_str(), report.auc_j,
                report.cc, report.kl, report.nss, report.sim);
  return std::string(buf);
}

}  // namespace salrate

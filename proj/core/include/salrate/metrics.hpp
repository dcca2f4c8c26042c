#pragma once

#include <string>
#include <vector>

#include "salrate/types.hpp"

namespace salrate {

/// Pearson correlation over pixels. Both maps must be non-constant.
double cc(const PixelMap& pred, const PixelMap& gt);

/// Kullback-Leibler divergence, natural log. Both maps are treated as
/// distributions: gt is sum-normalized; pred is sum-normalized (an all-zero
/// pred stays zero), regularized with eps = 1e-12 per pixel and renormalized
/// by (1 + n*eps) so it remains a proper distribution. The sum runs over
/// pixels with positive ground truth.
double kl_div(const PixelMap& pred, const PixelMap& gt);

/// Mean z-scored (population std) prediction value at fixation pixels.
/// Fixations map to pixels by round-half-up on each coordinate.
double nss(const PixelMap& pred, const FixationSet& fixations, int frame);

/// Histogram intersection of the sum-normalized maps.
double sim(const PixelMap& pred, const PixelMap& gt);

/// ROC area with thresholds at the distinct prediction values observed at
/// fixation pixels; TPR over fixations, FPR over all pixels, trapezoidal
/// integration with (0,0) and (1,1) anchors. Chance level is 0.5.
double auc_judd(const PixelMap& pred, const FixationSet& fixations, int frame);

/// Per-pixel SSIM values in [-1, 1].
struct SsimMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
  double mean() const;
};

/// Standard SSIM with an 11x11 Gaussian window (sigma 1.5),
/// C1=(0.01*255)^2, C2=(0.03*255)^2, symmetric edge padding.
SsimMap ssim_map(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b,
                 int width, int height);

/// Saliency-weighted mean of the per-pixel SSIM map for one frame pair.
double weighted_ssim(const SsimMap& ssim, const SaliencyMap& weights);

/// Per frame: sum(w * ssim) / sum(w); sequence value is the mean over frames.
/// Every weight map needs a positive sum.
std::vector<double> ewssim_per_frame(const VideoSequence& original,
                                     const VideoSequence& compressed,
                                     const std::vector<SaliencyMap>& weights);
double ewssim(const VideoSequence& original, const VideoSequence& compressed,
              const std::vector<SaliencyMap>& weights);

/// The objective battery for one model, averaged over evaluated frames.
struct MetricReport {
  double auc_j = 0.0;  // higher better
  double cc = 0.0;     // higher better
  double kl = 0.0;     // lower better
  double nss = 0.0;    // higher better
  double sim = 0.0;    // higher better
};

/// CSV row in the column order `model,auc_j,cc,kl,nss,sim`.
std::string metric_report_csv_row(const std::string& model, const MetricReport& report);

}  // namespace salrate

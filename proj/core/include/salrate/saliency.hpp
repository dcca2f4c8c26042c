#pragma once

#include "salrate/types.hpp"

namespace salrate {

struct GaussianKernelSpec {
  double sigma = 120.0;
};

struct PercentileSplit {
  double s_p = 0.0;  // the attained value at the p-th percentile
  double p = 0.0;    // percent in (0, 100)
};

enum class NormalizeMode { MAX_ONE, SUM_ONE, Z_SCORE };

/// Sum of unnormalized Gaussian kernels centered at the fixations of one
/// frame, max-normalized to [0,1] when any mass is present. Fixations outside
/// the frame are ignored. Kernel evaluation is truncated at radius 4*sigma;
/// the truncated tail is below exp(-8) of the peak before normalization.
SaliencyMap fixations_to_map(const FixationSet& fix, int frame, int width,
                             int height, const GaussianKernelSpec& kernel);

/// fixations_to_map restricted to one observer's records. The observer must
/// appear somewhere in the set (any frame), otherwise UNKNOWN_OBSERVER.
SaliencyMap single_observer_map(const FixationSet& fix, int observer_id,
                                int frame, int width, int height,
                                const GaussianKernelSpec& kernel);

/// Content-independent anisotropic Gaussian centered at the frame midpoint,
/// sigma_x = sigma_x_frac*width, sigma_y = sigma_y_frac*height,
/// max-normalized. Exactly symmetric under horizontal and vertical flips.
SaliencyMap center_prior(int width, int height, double sigma_x_frac = 0.28,
                         double sigma_y_frac = 0.28);

/// Ceil-rank percentile: s_p = sorted_values[ceil(p/100 * count) - 1].
/// The result is always an attained map value.
PercentileSplit percentile(const PixelMap& map, double p);

/// MAX_ONE and SUM_ONE require positive max/sum; Z_SCORE requires a
/// non-constant map and returns a signed map (mean 0, population std 1).
PixelMap normalize(const PixelMap& map, NormalizeMode mode);

}  // namespace salrate

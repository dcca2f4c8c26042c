#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "salrate/types.hpp"

namespace salrate {

/// Brightness exponent, center-prior blend weight, and the precomputed
/// center-prior image the weight blends against.
struct PostprocessParams {
  double gamma = 1.0;     // in [1/8, 8]
  double blend_w = 0.0;   // in [0, 1]
  SaliencyMap cp;
};

/// out = (1 - blend_w) * map^gamma + blend_w * cp, elementwise.
/// Input map is expected max-normalized to [0,1]; output stays in [0,1].
SaliencyMap apply_postprocess(const SaliencyMap& map, const PostprocessParams& params);

// Grid used by fit_postprocess: 33 log-spaced gamma points spanning [1/8, 8]
// and 21 blend weights {0, 0.05, ..., 1.0}.
inline constexpr int kGammaGridSize = 33;
inline constexpr int kBlendGridSize = 21;
double gamma_grid_point(int i);
double blend_grid_point(int j);

/// Exhaustive grid search for the (gamma, blend_w) pair minimizing the mean
/// squared error between postprocessed predictions and ground truth. Exact
/// MSE ties break toward the pair closest to the identity (1, 0).
PostprocessParams fit_postprocess(const std::vector<SaliencyMap>& predicted,
                                  const std::vector<SaliencyMap>& ground_truth,
                                  const SaliencyMap& cp);

// Three-line parameter file: gamma=<v>, blend_w=<v>, cp=<path>. The
// center-prior image itself is stored separately as a PGM.
struct PostprocessParamsFile {
  double gamma = 1.0;
  double blend_w = 0.0;
  std::string cp_path;
};

void write_postprocess_params(const PostprocessParamsFile& params,
                              const std::filesystem::path& path);
PostprocessParamsFile read_postprocess_params(const std::filesystem::path& path);

}  // namespace salrate

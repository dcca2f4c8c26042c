#include "salrate/postprocess.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "io_util.hpp"
#include "salrate/error.hpp"

namespace salrate {

double gamma_grid_point(int i) {
  // 33 points log-spaced over [1/8, 8]: exponents -3..3 step 3/16 in log2.
  return std::exp2(-3.0 + 6.0 * i / (kGammaGridSize - 1));
}

double blend_grid_point(int j) {
  return static_cast<double>(j) / (kBlendGridSize - 1);
}

SaliencyMap apply_postprocess(const SaliencyMap& map, const PostprocessParams& params) {
  if (!map.same_size(params.cp)) {
    fail(ErrorCode::DIMENSION_MISMATCH, "center-prior image does not match the map");
  }
  SaliencyMap out(map.width, map.height);
  const double w = params.blend_w;
  for (size_t i = 0; i < map.values.size(); ++i) {
    out.values[i] = (1.0 - w) * std::pow(map.values[i], params.gamma) + w * params.cp.values[i];
  }
  return out;
}

PostprocessParams fit_postprocess(const std::vector<SaliencyMap>& predicted,
                                  const std::vector<SaliencyMap>& ground_truth,
                                  const SaliencyMap& cp) {
  if (predicted.empty() || predicted.size() != ground_truth.size()) {
    fail(ErrorCode::EMPTY_TRAINING_SET, "training lists empty or of unequal length");
  }
  size_t total_pixels = 0;
  for (size_t k = 0; k < predicted.size(); ++k) {
    if (!predicted[k].same_size(ground_truth[k]) || !predicted[k].same_size(cp)) {
      fail(ErrorCode::DIMENSION_MISMATCH, "training pair " + std::to_string(k));
    }
    total_pixels += predicted[k].pixel_count();
  }

  double best_mse = 0.0;
  double best_dist = 0.0;
  int best_gi = -1;
  int best_wj = -1;
  for (int gi = 0; gi < kGammaGridSize; ++gi) {
    const double gamma = gamma_grid_point(gi);
    // With A = pred^gamma, D = A - gt and E = cp - A, the error at weight w
    // is D + w*E, so MSE(w) = d2 + 2w*de + w^2*e2 from three accumulators.
    double d2 = 0.0;
    double de = 0.0;
    double e2 = 0.0;
    for (size_t k = 0; k < predicted.size(); ++k) {
      const auto& pred = predicted[k].values;
      const auto& gt = ground_truth[k].values;
      const auto& prior = cp.values;
      for (size_t i = 0; i < pred.size(); ++i) {
        const double a = std::pow(pred[i], gamma);
        const double d = a - gt[i];
        const double e = prior[i] - a;
        d2 += d * d;
        de += d * e;
        e2 += e * e;
      }
    }
    for (int wj = 0; wj < kBlendGridSize; ++wj) {
      const double w = blend_grid_point(wj);
      const double mse = (d2 + 2.0 * w * de + w * w * e2) / static_cast<double>(total_pixels);
      const double lg = std::log2(gamma);
      const double dist = lg * lg + w * w;  // distance from the identity (1, 0)
      bool better = best_gi < 0 || mse < best_mse ||
                    (mse == best_mse &&
                     (dist < best_dist ||
                      (dist == best_dist && (gamma < gamma_grid_point(best_gi) ||
                                             (gi == best_gi && w < blend_grid_point(best_wj))))));
      if (better) {
        best_mse = mse;
        best_dist = dist;
        best_gi = gi;
        best_wj = wj;
      }
    }
  }

  PostprocessParams params;
  params.gamma = gamma_grid_point(best_gi);
  params.blend_w = blend_grid_point(best_wj);
  params.cp = cp;
  return params;
}

void write_postprocess_params(const PostprocessParamsFile& params,
                              const std::filesystem::path& path) {
  std::ofstream out = detail::open_output(path);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", params.gamma);
  out << "gamma=" << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", params.blend_w);
  out << "blend_w=" << buf << "\n";
  out << "cp=" << params.cp_path << "\n";
  if (!out) fail(ErrorCode::IO_FAILURE, "params write failed");
}

PostprocessParamsFile read_postprocess_params(const std::filesystem::path& path) {
  std::ifstream in = detail::open_input(path);
  PostprocessParamsFile params;
  bool have_gamma = false;
  bool have_w = false;
  bool have_cp = false;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view body = detail::trim_cr(line);
    if (body.empty()) continue;
    size_t eq = body.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::BAD_CONFIG, "expected key=value: " + line);
    std::string_view key = body.substr(0, eq);
    std::string_view value = body.substr(eq + 1);
    if (key == "gamma") {
      have_gamma = detail::parse_double(value, params.gamma);
      if (!have_gamma) fail(ErrorCode::BAD_CONFIG, "bad gamma value");
    } else if (key == "blend_w") {
      have_w = detail::parse_double(value, params.blend_w);
      if (!have_w) fail(ErrorCode::BAD_CONFIG, "bad blend_w value");
    } else if (key == "cp") {
      params.cp_path = std::string(value);
      have_cp = true;
    } else {
      fail(ErrorCode::BAD_CONFIG, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_gamma || !have_w || !have_cp) {
    fail(ErrorCode::BAD_CONFIG, "params file needs gamma, blend_w and cp lines");
  }
  if (!(params.gamma >= 0.125 && params.gamma <= 8.0)) {
    fail(ErrorCode::OUT_OF_RANGE, "gamma outside [1/8, 8]");
  }
  if (!(params.blend_w >= 0.0 && params.blend_w <= 1.0)) {
    fail(ErrorCode::OUT_OF_RANGE, "blend_w outside [0, 1]");
  }
  return params;
}

}  // namespace salrate

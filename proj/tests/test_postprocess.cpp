#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "salrate/error.hpp"
#include "salrate/postprocess.hpp"
#include "salrate/saliency.hpp"
#include "support.hpp"

using namespace salrate;

namespace {

double training_mse(const std::vector<SaliencyMap>& pred,
                    const std::vector<SaliencyMap>& gt, const PostprocessParams& params) {
  double acc = 0.0;
  size_t count = 0;
  for (size_t k = 0; k < pred.size(); ++k) {
    SaliencyMap out = apply_postprocess(pred[k], params);
    for (size_t i = 0; i < out.values.size(); ++i) {
      const double d = out.values[i] - gt[k].values[i];
      acc += d * d;
    }
    count += out.values.size();
  }
  return acc / static_cast<double>(count);
}

// Max-normalized random maps, the shape fit_postprocess expects.
std::vector<SaliencyMap> random_training(int frames, int w, int h, uint32_t seed) {
  std::mt19937 rng(seed);
  std::vector<SaliencyMap> maps;
  for (int f = 0; f < frames; ++f) {
    PixelMap m = testsupport::random_map(w, h, rng);
    double peak = *std::max_element(m.values.begin(), m.values.end());
    for (double& v : m.values) v /= peak;
    maps.push_back(std::move(m));
  }
  return maps;
}

std::vector<SaliencyMap> planted_truth(const std::vector<SaliencyMap>& pred,
                                       const SaliencyMap& cp, double gamma, double w) {
  PostprocessParams params{gamma, w, cp};
  std::vector<SaliencyMap> gt;
  for (const SaliencyMap& m : pred) gt.push_back(apply_postprocess(m, params));
  return gt;
}

}  // namespace

TEST_CASE("apply_postprocess: identity, pure prior, and one pixel by hand") {
  std::mt19937 rng(1);
  SaliencyMap map = testsupport::random_map(8, 8, rng);
  SaliencyMap cp = center_prior(8, 8, 0.3, 0.3);

  SaliencyMap same = apply_postprocess(map, {1.0, 0.0, cp});
  for (size_t i = 0; i < map.values.size(); ++i) {
    CHECK(same.values[i] == doctest::Approx(map.values[i]).epsilon(1e-15));
  }

  SaliencyMap prior_only = apply_postprocess(map, {3.0, 1.0, cp});
  CHECK(prior_only.values == cp.values);

  SaliencyMap one(1, 1, 0.25);
  SaliencyMap one_cp(1, 1, 0.8);
  SaliencyMap out = apply_postprocess(one, {2.0, 0.5, one_cp});
  CHECK(out.values[0] == doctest::Approx(0.43125).epsilon(1e-15));
}

TEST_CASE("apply_postprocess: dimension mismatch") {
  SaliencyMap map(4, 4, 0.5);
  SaliencyMap cp(5, 4, 0.5);
  try {
    apply_postprocess(map, {1.0, 0.5, cp});
    FAIL("expected DIMENSION_MISMATCH");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DIMENSION_MISMATCH);
  }
}

TEST_CASE("fit_postprocess: plant-and-recover on the grid is exact") {
  auto pred = random_training(4, 12, 10, 77);
  SaliencyMap cp = center_prior(12, 10, 0.28, 0.28);
  const double gamma_star = gamma_grid_point(20);
  const double w_star = blend_grid_point(6);  // 0.30
  auto gt = planted_truth(pred, cp, gamma_star, w_star);

  PostprocessParams fit = fit_postprocess(pred, gt, cp);
  CHECK(fit.gamma == gamma_star);
  CHECK(fit.blend_w == w_star);
}

TEST_CASE("fit_postprocess: identical lists prefer the identity") {
  auto pred = random_training(3, 9, 7, 5);
  SaliencyMap cp = center_prior(9, 7, 0.28, 0.28);
  PostprocessParams fit = fit_postprocess(pred, pred, cp);
  CHECK(fit.gamma == 1.0);
  CHECK(fit.blend_w == 0.0);
}

TEST_CASE("fit_postprocess: all-zero predictions push the blend to the prior") {
  std::vector<SaliencyMap> pred(3, SaliencyMap(6, 5, 0.0));
  SaliencyMap cp = center_prior(6, 5, 0.28, 0.28);
  std::vector<SaliencyMap> gt(3, cp);
  PostprocessParams fit = fit_postprocess(pred, gt, cp);
  CHECK(fit.blend_w == 1.0);
}

TEST_CASE("fit_postprocess: off-grid truth recovered within one grid step") {
  auto pred = random_training(4, 12, 10, 13);
  SaliencyMap cp = center_prior(12, 10, 0.28, 0.28);
  auto gt = planted_truth(pred, cp, 2.0, 0.33);

  PostprocessParams fit = fit_postprocess(pred, gt, cp);
  const double log_step = 6.0 / (kGammaGridSize - 1);
  CHECK(std::abs(std::log2(fit.gamma) - std::log2(2.0)) <= log_step + 1e-12);
  CHECK(std::abs(fit.blend_w - 0.33) <= 0.05 + 1e-12);
}

TEST_CASE("fit_postprocess: fitted MSE never loses to the identity") {
  for (uint32_t seed : {3u, 17u, 23u}) {
    auto pred = random_training(3, 10, 8, seed);
    auto gt = random_training(3, 10, 8, seed + 1000);
    SaliencyMap cp = center_prior(10, 8, 0.28, 0.28);
    PostprocessParams fit = fit_postprocess(pred, gt, cp);
    const double fitted = training_mse(pred, gt, fit);
    const double identity = training_mse(pred, gt, {1.0, 0.0, cp});
    CHECK(fitted <= identity + 1e-15);
  }
}

TEST_CASE("fit_postprocess: result invariant to training-list order") {
  auto pred = random_training(5, 9, 9, 31);
  SaliencyMap cp = center_prior(9, 9, 0.28, 0.28);
  auto gt = planted_truth(pred, cp, 1.9, 0.4);

  PostprocessParams forward = fit_postprocess(pred, gt, cp);
  std::vector<SaliencyMap> pred_rev(pred.rbegin(), pred.rend());
  std::vector<SaliencyMap> gt_rev(gt.rbegin(), gt.rend());
  PostprocessParams reversed = fit_postprocess(pred_rev, gt_rev, cp);
  CHECK(forward.gamma == reversed.gamma);
  CHECK(forward.blend_w == reversed.blend_w);
}

TEST_CASE("apply_postprocess: monotone in map values when blend_w < 1") {
  std::mt19937 rng(9);
  SaliencyMap map = testsupport::random_map(16, 16, rng);
  SaliencyMap cp(16, 16, 0.5);
  SaliencyMap out = apply_postprocess(map, {2.7, 0.6, cp});
  for (size_t i = 1; i < map.values.size(); ++i) {
    if (map.values[i - 1] < map.values[i]) {
      CHECK(out.values[i - 1] <= out.values[i]);
    }
  }
}

TEST_CASE("fit_postprocess: empty training set") {
  SaliencyMap cp(4, 4, 0.5);
  try {
    fit_postprocess({}, {}, cp);
    FAIL("expected EMPTY_TRAINING_SET");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EMPTY_TRAINING_SET);
  }
}

TEST_CASE("postprocess params file round-trip") {
  testsupport::TempDir dir;
  PostprocessParamsFile params{1.75, 0.35, "priors/cp.pgm"};
  write_postprocess_params(params, dir.file("pp.txt"));
  PostprocessParamsFile back = read_postprocess_params(dir.file("pp.txt"));
  CHECK(back.gamma == params.gamma);
  CHECK(back.blend_w == params.blend_w);
  CHECK(back.cp_path == params.cp_path);
}

TEST_CASE("postprocess params file rejects bad content") {
  testsupport::TempDir dir;
  {
    std::ofstream out(dir.file("bad.txt"));
    out << "gamma=64\nblend_w=0.5\ncp=x.pgm\n";
  }
  try {
    read_postprocess_params(dir.file("bad.txt"));
    FAIL("expected OUT_OF_RANGE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OUT_OF_RANGE);
  }
  {
    std::ofstream out(dir.file("junk.txt"));
    out << "nonsense\n";
  }
  CHECK_THROWS_AS((void)read_postprocess_params(dir.file("junk.txt")), Error);
}

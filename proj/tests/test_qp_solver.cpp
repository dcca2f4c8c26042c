#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "salrate/codec.hpp"
#include "salrate/error.hpp"
#include "salrate/qp_solver.hpp"
#include "support.hpp"

using namespace salrate;

namespace {

// Region maps assembled directly (not via a pixel map); block saliencies are
// chosen consistent with the sp/sn values.
RegionMaps make_regions(std::vector<double> sn, std::vector<double> sp, double s_p = 1.0) {
  RegionMaps regions;
  regions.mb_width = static_cast<int>(sn.size());
  regions.mb_height = 1;
  regions.sn = std::move(sn);
  regions.sp = std::move(sp);
  regions.s_p = s_p;
  regions.block_sal.resize(regions.sn.size());
  for (size_t i = 0; i < regions.sn.size(); ++i) {
    regions.block_sal[i] = s_p + regions.sp[i] - regions.sn[i];
  }
  return regions;
}

QpMap uniform_blocks(int count, int qp) {
  QpMap map(count, 1);
  for (int& v : map.qp) v = qp;
  return map;
}

}  // namespace

TEST_CASE("analytic_bit_cost: halving law") {
  CHECK(analytic_bit_cost(0) == 1.0);
  CHECK(analytic_bit_cost(6) == 0.5);
  CHECK(analytic_bit_cost(30) == 0.03125);
  for (int q = 0; q <= 45; ++q) {
    CHECK(analytic_bit_cost(q + 6) == doctest::Approx(analytic_bit_cost(q) / 2).epsilon(1e-15));
  }
  CHECK_THROWS_AS((void)analytic_bit_cost(-1), Error);
  CHECK_THROWS_AS((void)analytic_bit_cost(52), Error);
}

TEST_CASE("BitCostModel: LUT validation and interpolation") {
  std::vector<double> bad(52, 1.0);
  CHECK_THROWS_AS((void)BitCostModel::from_lut(bad), Error);

  std::vector<double> good(52);
  for (int q = 0; q < 52; ++q) good[static_cast<size_t>(q)] = 1000.0 * std::exp2(-q / 6.0);
  BitCostModel lut = BitCostModel::from_lut(good);
  CHECK(lut.lut_entry(0) == doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(lut.bits(3.5) < lut.bits(3.0));
  CHECK(lut.bits(-2.0) > lut.bits(0.0));
  CHECK(lut.bits(60.0) < lut.bits(51.0));
  CHECK(lut.bits(60.0) > 0.0);
}

TEST_CASE("calibrate_bit_cost: strictly decreasing after isotonic adjustment") {
  // Synthetic probe with a non-monotone bump.
  EncoderProbe bumpy = [](const std::vector<uint8_t>&, int, int, int qp) {
    double base = 4000.0 * std::exp2(-qp / 6.0) + 40.0;
    if (qp == 18) base *= 1.3;  // violator that PAV must absorb
    return base;
  };
  std::vector<uint8_t> frame(64 * 64, 128);
  BitCostModel model = calibrate_bit_cost(bumpy, frame, 64, 64);
  for (int q = 0; q < 51; ++q) {
    CHECK(model.lut_entry(q) > model.lut_entry(q + 1));
  }
  CHECK(model.lut_entry(3) < model.lut_entry(0));
  CHECK(model.lut_entry(3) > model.lut_entry(6));
}

TEST_CASE("calibrate_bit_cost: codec probe on real frames") {
  SUBCASE("constant gray frame stays strictly decreasing") {
    std::vector<uint8_t> gray(48 * 48, 128);
    BitCostModel model = calibrate_bit_cost(codec_probe(), gray, 48, 48);
    for (int q = 0; q < 51; ++q) CHECK(model.lut_entry(q) > model.lut_entry(q + 1));
  }
  SUBCASE("noise frame stays strictly decreasing") {
    auto noisy = testsupport::random_frame(48, 48, 3);
    BitCostModel model = calibrate_bit_cost(codec_probe(), noisy, 48, 48);
    for (int q = 0; q < 51; ++q) CHECK(model.lut_entry(q) > model.lut_entry(q + 1));
  }
}

TEST_CASE("calibrate_bit_cost: probe failures are typed") {
  EncoderProbe broken = [](const std::vector<uint8_t>&, int, int, int) { return -1.0; };
  std::vector<uint8_t> frame(16 * 16, 0);
  try {
    (void)calibrate_bit_cost(broken, frame, 16, 16);
    FAIL("expected PROBE_FAILURE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PROBE_FAILURE);
  }
}

TEST_CASE("block_saliency: means and edge slivers") {
  SaliencyMap constant(33, 20, 0.4);
  MacroblockGrid grid = block_saliency(constant);
  CHECK(grid.mb_width == 3);
  CHECK(grid.mb_height == 2);
  for (double v : grid.values) CHECK(v == doctest::Approx(0.4).epsilon(1e-15));

  SaliencyMap halves(32, 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 32; ++x) halves.at(x, y) = x < 16 ? 0.0 : 1.0;
  }
  MacroblockGrid two = block_saliency(halves);
  CHECK(two.values[0] == 0.0);
  CHECK(two.values[1] == 1.0);

  SaliencyMap sliver(17, 16, 0.0);
  for (int y = 0; y < 16; ++y) sliver.at(16, y) = 1.0;
  MacroblockGrid edges = block_saliency(sliver);
  REQUIRE(edges.values.size() == 2);
  CHECK(edges.values[0] == 0.0);
  CHECK(edges.values[1] == 1.0);  // 1x16 sliver averages its own pixels
}

TEST_CASE("region_maps: percentile split and boundary handling") {
  SUBCASE("constant map leaves both parts empty-handed") {
    SaliencyMap constant(32, 16, 0.5);
    RegionMaps regions = region_maps(constant, 50.0);
    for (size_t i = 0; i < regions.sp.size(); ++i) {
      CHECK(regions.sp[i] == 0.0);
      CHECK(regions.sn[i] == 0.0);
      CHECK_FALSE(regions.nonsalient(i));
    }
  }
  SUBCASE("two-block map from the formulas") {
    SaliencyMap map(32, 16);
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 32; ++x) map.at(x, y) = x < 16 ? 0.2 : 0.8;
    }
    RegionMaps regions = region_maps(map, 50.0);
    CHECK(regions.s_p == 0.2);
    CHECK(regions.sn[0] == 0.0);
    CHECK(regions.sn[1] == 0.0);
    CHECK(regions.sp[0] == 0.0);
    CHECK(regions.sp[1] == doctest::Approx(0.6).epsilon(1e-15));
  }
  SUBCASE("p=80 on ten distinct block values") {
    SaliencyMap map(160, 16);
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 160; ++x) map.at(x, y) = 0.05 + 0.1 * (x / 16);
    }
    RegionMaps regions = region_maps(map, 80.0);
    int on_or_below = 0;
    for (size_t i = 0; i < regions.sn.size(); ++i) {
      if (regions.block_sal[i] <= regions.s_p) ++on_or_below;
    }
    CHECK(on_or_below == 8);
  }
}

TEST_CASE("solve_alpha_beta: zero is a root when budgets already hold") {
  QpMap q = uniform_blocks(2, 30);
  RegionMaps regions = make_regions({1.0, 0.0}, {0.0, 1.0});
  SolveResult result = solve_alpha_beta(q, regions, 50.0, BitCostModel::analytic());
  CHECK(result.status == SolveStatus::OK);
  CHECK(result.alpha == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(result.beta == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(result.q_prime.qp == std::vector<int>{30, 30});
}

TEST_CASE("solve_alpha_beta: the two-block closed-form instance") {
  QpMap q = uniform_blocks(2, 30);
  RegionMaps regions = make_regions({1.0, 0.0}, {0.0, 1.0});
  SolveResult result = solve_alpha_beta(q, regions, 70.0, BitCostModel::analytic());

  // Closed-form inversion of B(q) = 2^(-q/6):
  //   B(30 - beta) = 0.7 * 0.0625  => beta  = 30 + 6*log2(0.04375)
  //   B(30 + alpha) = 0.3 * 0.0625 => alpha = -6*log2(0.01875) - 30
  const double beta_expected = 30.0 + 6.0 * std::log2(0.04375);
  const double alpha_expected = -6.0 * std::log2(0.01875) - 30.0;
  CHECK(result.status == SolveStatus::OK);
  CHECK(result.beta == doctest::Approx(beta_expected).epsilon(1e-9));
  CHECK(result.alpha == doctest::Approx(alpha_expected).epsilon(1e-9));
  CHECK(result.beta == doctest::Approx(2.9126).epsilon(1e-3));
  CHECK(result.alpha == doctest::Approx(4.4218).epsilon(1e-3));
  CHECK(result.q_prime.qp == std::vector<int>{27, 34});
  CHECK(result.achieved_nonsalient_share == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(result.clamped_blocks == 0);
}

TEST_CASE("solve_alpha_beta: empty regions pass the map through") {
  QpMap q = uniform_blocks(3, 24);
  RegionMaps all_salient = make_regions({0.0, 0.0, 0.0}, {0.1, 0.2, 0.0});
  SolveResult result = solve_alpha_beta(q, all_salient, 70.0, BitCostModel::analytic());
  CHECK(result.status == SolveStatus::EMPTY_REGION);
  CHECK(result.q_prime.qp == q.qp);
}

TEST_CASE("solve_alpha_beta: salient side without leverage reports NO_BRACKET") {
  QpMap q = uniform_blocks(2, 30);
  // Nonsalient block has slack; salient block sits exactly on the boundary,
  // so alpha cannot move its bits to the 30% target.
  RegionMaps regions = make_regions({0.4, 0.0}, {0.0, 0.0});
  SolveResult result = solve_alpha_beta(q, regions, 70.0, BitCostModel::analytic());
  CHECK(result.status == SolveStatus::NO_BRACKET);
}

TEST_CASE("solve_alpha_beta: clamping freezes blocks and re-solves") {
  // Aggressive b forces the single nonsalient block far down in QP.
  QpMap q = uniform_blocks(3, 48);
  RegionMaps regions = make_regions({1.0, 0.0, 0.0}, {0.0, 0.5, 1.0});
  SolveResult result = solve_alpha_beta(q, regions, 99.0, BitCostModel::analytic());
  CHECK(result.clamped_blocks > 0);
  for (int qp : result.q_prime.qp) {
    CHECK(qp >= 0);
    CHECK(qp <= 51);
  }
}

TEST_CASE("solve_alpha_beta: monotone response to the budget split") {
  QpMap q = uniform_blocks(4, 30);
  RegionMaps regions = make_regions({0.8, 0.3, 0.0, 0.0}, {0.0, 0.0, 0.2, 0.9});
  double last_beta = -1e9;
  double last_alpha = -1e9;
  for (double b : {40.0, 50.0, 60.0, 70.0}) {
    SolveResult result = solve_alpha_beta(q, regions, b, BitCostModel::analytic());
    REQUIRE(result.status == SolveStatus::OK);
    CHECK(result.beta > last_beta);             // more bits: nonsalient QPs drop
    CHECK(result.alpha >= last_alpha - 1e-12);  // complement loses weakly
    last_beta = result.beta;
    last_alpha = result.alpha;
  }
}

TEST_CASE("solve_alpha_beta: scale invariance of the region maps") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> coef(0.05, 1.0);
  QpMap q = uniform_blocks(6, 28);
  RegionMaps regions =
      make_regions({coef(rng), coef(rng), coef(rng), 0.0, 0.0, 0.0},
                   {0.0, 0.0, 0.0, coef(rng), coef(rng), coef(rng)});
  SolveResult base = solve_alpha_beta(q, regions, 65.0, BitCostModel::analytic());

  const double c = 7.5;
  RegionMaps scaled = regions;
  for (double& v : scaled.sn) v *= c;
  for (double& v : scaled.sp) v *= c;
  SolveResult rescaled = solve_alpha_beta(q, scaled, 65.0, BitCostModel::analytic());

  CHECK(rescaled.q_prime.qp == base.q_prime.qp);
  CHECK(rescaled.alpha * c == doctest::Approx(base.alpha).epsilon(1e-6));
  CHECK(rescaled.beta * c == doctest::Approx(base.beta).epsilon(1e-6));
}

TEST_CASE("solve_alpha_beta: bisection matches the joint grid-search oracle") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> n_blocks(2, 8);
  std::uniform_int_distribution<int> qp(15, 40);
  std::uniform_real_distribution<double> coef(0.05, 1.0);
  std::uniform_real_distribution<double> split(30.0, 70.0);

  int compared = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = n_blocks(rng);
    QpMap q(n, 1);
    for (int& v : q.qp) v = qp(rng);
    std::vector<double> sn(static_cast<size_t>(n), 0.0);
    std::vector<double> sp(static_cast<size_t>(n), 0.0);
    const int n_nonsalient = 1 + static_cast<int>(rng() % static_cast<uint32_t>(n - 1));
    for (int i = 0; i < n; ++i) {
      if (i < n_nonsalient) {
        sn[static_cast<size_t>(i)] = coef(rng);
      } else {
        sp[static_cast<size_t>(i)] = coef(rng);
      }
    }
    RegionMaps regions = make_regions(sn, sp);
    const double b = split(rng);
    SolveResult result = solve_alpha_beta(q, regions, b, BitCostModel::analytic());
    if (result.status != SolveStatus::OK || result.clamped_blocks > 0) continue;

    oracle::GridSearchResult grid = oracle::solver_grid_search(
        q, regions, b, BitCostModel::analytic(), result.alpha, result.beta);
    CHECK(std::abs(grid.alpha - result.alpha) <= 2e-3);
    CHECK(std::abs(grid.beta - result.beta) <= 2e-3);
    CHECK(result.achieved_nonsalient_share == doctest::Approx(b / 100.0).epsilon(1e-9));
    ++compared;
  }
  CHECK(compared >= 15);
}

TEST_CASE("build_qp_maps: degenerate frames pass through") {
  std::vector<SaliencyMap> flat(3, SaliencyMap(64, 48, 0.7));
  std::vector<FrameDiagnostics> diag;
  std::vector<QpMap> maps =
      build_qp_maps(64, 48, flat, 33, 80.0, 70.0, BitCostModel::analytic(), &diag);
  REQUIRE(maps.size() == 3);
  for (const QpMap& map : maps) {
    for (int qp : map.qp) CHECK(qp == 33);
  }
  for (const FrameDiagnostics& d : diag) CHECK(d.status == SolveStatus::EMPTY_REGION);
}

TEST_CASE("build_qp_maps: three-level fixture reproduces the q' pair") {
  // Left block below the 80th-percentile pixel value, right block above it;
  // the budget equations pin q' = (27, 34) regardless of the sp/sn scale.
  SaliencyMap map(32, 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 32; ++x) {
      if (x < 16) {
        map.at(x, y) = 0.2;
      } else {
        map.at(x, y) = (y * 32 + x) % 8 < 5 ? 0.5 : 0.9;
      }
    }
  }
  std::vector<FrameDiagnostics> diag;
  std::vector<QpMap> maps =
      build_qp_maps(32, 16, {map}, 30, 80.0, 70.0, BitCostModel::analytic(), &diag);
  REQUIRE(maps.size() == 1);
  REQUIRE(diag[0].status == SolveStatus::OK);
  CHECK(maps[0].qp == std::vector<int>{27, 34});
}

TEST_CASE("build_qp_maps: saliency dimensions must match") {
  std::vector<SaliencyMap> wrong(1, SaliencyMap(16, 16, 0.5));
  CHECK_THROWS_AS(
      (void)build_qp_maps(32, 16, wrong, 30, 80.0, 70.0, BitCostModel::analytic()), Error);
}

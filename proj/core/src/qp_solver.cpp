#include "salrate/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "salrate/error.hpp"
#include "salrate/parallel.hpp"
#include "salrate/saliency.hpp"

namespace salrate {

namespace {

// QPs sampled when calibrating a LUT model.
const int kProbeQps[] = {0, 6, 12, 18, 24, 30, 36, 42, 48, 51};

constexpr double kMaxBracket = 1e18;
constexpr int kBisectIterations = 200;
constexpr int kMaxOuterPasses = 52;

}  // namespace

double analytic_bit_cost(int q) {
  if (q < kMinQp || q > kMaxQp) {
    fail(ErrorCode::OUT_OF_RANGE, "qp " + std::to_string(q) + " outside [0, 51]");
  }
  return std::exp2(-q / 6.0);
}

BitCostModel BitCostModel::analytic() { return BitCostModel(Kind::ANALYTIC, {}); }

BitCostModel BitCostModel::from_lut(const std::vector<double>& bits_per_qp) {
  if (bits_per_qp.size() != static_cast<size_t>(kMaxQp + 1)) {
    fail(ErrorCode::OUT_OF_RANGE, "LUT needs exactly 52 entries");
  }
  std::vector<double> log_bits(bits_per_qp.size());
  for (size_t i = 0; i < bits_per_qp.size(); ++i) {
    if (!(bits_per_qp[i] > 0.0) || !std::isfinite(bits_per_qp[i])) {
      fail(ErrorCode::OUT_OF_RANGE, "LUT entries must be positive and finite");
    }
    if (i > 0 && !(bits_per_qp[i] < bits_per_qp[i - 1])) {
      fail(ErrorCode::OUT_OF_RANGE, "LUT must be strictly decreasing");
    }
    log_bits[i] = std::log(bits_per_qp[i]);
  }
  return BitCostModel(Kind::LUT, std::move(log_bits));
}

double BitCostModel::bits(double q) const {
  if (kind_ == Kind::ANALYTIC) return std::exp2(-q / 6.0);
  // Piecewise log-linear over the integer knots; edge slopes extend outward
  // so the model stays strictly decreasing on the whole real line.
  const int last = kMaxQp;
  if (q <= 0.0) {
    return std::exp(log_bits_[0] + q * (log_bits_[1] - log_bits_[0]));
  }
  if (q >= last) {
    return std::exp(log_bits_[last] +
                    (q - last) * (log_bits_[last] - log_bits_[last - 1]));
  }
  int k = static_cast<int>(q);
  if (k >= last) k = last - 1;
  const double t = q - k;
  return std::exp(log_bits_[k] + t * (log_bits_[k + 1] - log_bits_[k]));
}

double BitCostModel::lut_entry(int q) const {
  if (q < kMinQp || q > kMaxQp) {
    fail(ErrorCode::OUT_OF_RANGE, "qp " + std::to_string(q) + " outside [0, 51]");
  }
  if (kind_ == Kind::ANALYTIC) return std::exp2(-q / 6.0);
  return std::exp(log_bits_[static_cast<size_t>(q)]);
}

BitCostModel calibrate_bit_cost(const EncoderProbe& probe,
                                const std::vector<uint8_t>& frame, int width,
                                int height) {
  if (!probe) fail(ErrorCode::PROBE_FAILURE, "null encoder probe");

  std::vector<double> samples;
  samples.reserve(std::size(kProbeQps));
  for (int qp : kProbeQps) {
    double bits = 0.0;
    try {
      bits = probe(frame, width, height, qp);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      fail(ErrorCode::PROBE_FAILURE, e.what());
    }
    if (!std::isfinite(bits) || !(bits > 0.0)) {
      fail(ErrorCode::PROBE_FAILURE, "probe returned " + std::to_string(bits) +
                                        " at qp " + std::to_string(qp));
    }
    samples.push_back(bits);
  }

  // Pool adjacent violators into a non-increasing fit.
  std::vector<double> pooled_sum;
  std::vector<int> pooled_count;
  for (double s : samples) {
    pooled_sum.push_back(s);
    pooled_count.push_back(1);
    while (pooled_sum.size() > 1) {
      size_t last = pooled_sum.size() - 1;
      double prev_mean = pooled_sum[last - 1] / pooled_count[last - 1];
      double cur_mean = pooled_sum[last] / pooled_count[last];
      if (prev_mean >= cur_mean) break;
      pooled_sum[last - 1] += pooled_sum[last];
      pooled_count[last - 1] += pooled_count[last];
      pooled_sum.pop_back();
      pooled_count.pop_back();
    }
  }
  std::vector<double> fitted;
  fitted.reserve(samples.size());
  for (size_t b = 0; b < pooled_sum.size(); ++b) {
    double mean = pooled_sum[b] / pooled_count[b];
    for (int r = 0; r < pooled_count[b]; ++r) fitted.push_back(mean);
  }
  // Strictly decreasing: flat runs pick up a tiny relative decay.
  for (size_t i = 1; i < fitted.size(); ++i) {
    fitted[i] = std::min(fitted[i], fitted[i - 1] * (1.0 - 1e-6));
  }

  std::vector<double> lut(static_cast<size_t>(kMaxQp + 1));
  for (size_t s = 0; s + 1 < std::size(kProbeQps); ++s) {
    const int qa = kProbeQps[s];
    const int qb = kProbeQps[s + 1];
    const double la = std::log(fitted[s]);
    const double lb = std::log(fitted[s + 1]);
    for (int q = qa; q <= qb; ++q) {
      const double t = static_cast<double>(q - qa) / (qb - qa);
      lut[static_cast<size_t>(q)] = std::exp(la + t * (lb - la));
    }
  }
  return BitCostModel::from_lut(lut);
}

namespace {

// Pairwise reduction: keeps block means of constant regions exact (a full
// 16x16 block of equal values sums to exactly 256x), so blocks sitting
// exactly at s_p land on the boundary as the region formulas expect.
double pairwise_sum(const double* values, size_t count) {
  if (count == 1) return values[0];
  if (count == 2) return values[0] + values[1];
  const size_t half = count / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

}  // namespace

MacroblockGrid block_saliency(const SaliencyMap& map) {
  if (map.pixel_count() == 0) fail(ErrorCode::EMPTY_MAP, "block saliency of empty map");
  MacroblockGrid grid;
  grid.mb_width = mb_count_for(map.width);
  grid.mb_height = mb_count_for(map.height);
  grid.values.resize(static_cast<size_t>(grid.mb_width) * grid.mb_height);
  std::vector<double> block;
  block.reserve(kMacroblockSize * kMacroblockSize);
  for (int my = 0; my < grid.mb_height; ++my) {
    const int y0 = my * kMacroblockSize;
    const int y1 = std::min(map.height, y0 + kMacroblockSize);
    for (int mx = 0; mx < grid.mb_width; ++mx) {
      const int x0 = mx * kMacroblockSize;
      const int x1 = std::min(map.width, x0 + kMacroblockSize);
      block.clear();
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) block.push_back(map.at(x, y));
      }
      grid.values[static_cast<size_t>(my) * grid.mb_width + mx] =
          pairwise_sum(block.data(), block.size()) / static_cast<double>(block.size());
    }
  }
  return grid;
}

RegionMaps region_maps(const SaliencyMap& map, double p) {
  PercentileSplit split = percentile(map, p);  // per-pixel percentile
  MacroblockGrid grid = block_saliency(map);

  RegionMaps regions;
  regions.mb_width = grid.mb_width;
  regions.mb_height = grid.mb_height;
  regions.s_p = split.s_p;
  regions.block_sal = grid.values;
  regions.sp.resize(grid.values.size());
  regions.sn.resize(grid.values.size());
  for (size_t i = 0; i < grid.values.size(); ++i) {
    regions.sp[i] = std::max(grid.values[i] - split.s_p, 0.0);
    regions.sn[i] = std::max(split.s_p - grid.values[i], 0.0);
  }
  return regions;
}

namespace {

// One side of the decoupled system: find x with
//   sum_{i in side} B(q_i + sign*x*c_i) = target.
// Blocks with c_i == 0 contribute constant bits. Blocks whose rounded q'
// leaves [0,51] freeze at the bound and the remainder re-solves.
struct SideResult {
  double x = 0.0;
  bool bracket_failed = false;
  double model_bits = 0.0;  // continuous-solution bits of the whole side
  int clamped = 0;
};

SideResult solve_side(const QpMap& q, const std::vector<size_t>& side,
                      const std::vector<double>& coef, double sign, double target,
                      const BitCostModel& model, double tol, double total,
                      std::vector<int>& q_out) {
  SideResult result;

  std::vector<size_t> active;
  double fixed_bits = 0.0;
  for (size_t i : side) {
    if (coef[i] > 0.0) {
      active.push_back(i);
    } else {
      fixed_bits += model.bits(q.qp[i]);
      q_out[i] = q.qp[i];
    }
  }

  double frozen_bits = 0.0;
  double x = 0.0;
  double active_bits = 0.0;
  bool solved = false;

  for (int pass = 0; pass < kMaxOuterPasses; ++pass) {
    const double budget = target - fixed_bits - frozen_bits;

    if (active.empty()) {
      active_bits = 0.0;
      if (std::abs(budget) > tol * total) result.bracket_failed = true;
      break;
    }
    if (!(budget > 0.0)) {
      // Unreachable: positive bits remain on the active blocks. Park them at
      // the low-bits bound as the best achievable outcome.
      for (size_t i : active) {
        q_out[i] = kMaxQp;
        frozen_bits += model.bits(kMaxQp);
        ++result.clamped;
      }
      active.clear();
      active_bits = 0.0;
      result.bracket_failed = true;
      break;
    }

    auto side_bits = [&](double v) {
      double sum = 0.0;
      for (size_t i : active) sum += model.bits(q.qp[i] + sign * v * coef[i]);
      return sum;
    };

    // Bracket the root of side_bits(x) - budget; the function is strictly
    // monotone in x, so doubling an interval around 0 eventually straddles it.
    double lo = -1.0;
    double hi = 1.0;
    double f_lo = side_bits(lo) - budget;
    double f_hi = side_bits(hi) - budget;
    bool bracketed = (f_lo <= 0.0 && f_hi >= 0.0) || (f_lo >= 0.0 && f_hi <= 0.0);
    while (!bracketed && hi < kMaxBracket) {
      lo *= 2.0;
      hi *= 2.0;
      f_lo = side_bits(lo) - budget;
      f_hi = side_bits(hi) - budget;
      bracketed = (f_lo <= 0.0 && f_hi >= 0.0) || (f_lo >= 0.0 && f_hi <= 0.0);
    }
    if (!bracketed) {
      for (size_t i : active) {
        q_out[i] = kMaxQp;
        frozen_bits += model.bits(kMaxQp);
        ++result.clamped;
      }
      active.clear();
      active_bits = 0.0;
      result.bracket_failed = true;
      break;
    }

    for (int it = 0; it < kBisectIterations; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const double f_mid = side_bits(mid) - budget;
      if ((f_mid <= 0.0) == (f_lo <= 0.0)) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
    }
    x = 0.5 * (lo + hi);

    std::vector<size_t> keep;
    keep.reserve(active.size());
    bool froze = false;
    for (size_t i : active) {
      const double rounded = std::nearbyint(q.qp[i] + sign * x * coef[i]);
      if (rounded < kMinQp || rounded > kMaxQp) {
        const int clamp_qp = rounded < kMinQp ? kMinQp : kMaxQp;
        q_out[i] = clamp_qp;
        frozen_bits += model.bits(clamp_qp);
        ++result.clamped;
        froze = true;
      } else {
        keep.push_back(i);
      }
    }
    active.swap(keep);
    if (!froze) {
      active_bits = side_bits(x);
      for (size_t i : active) {
        q_out[i] = static_cast<int>(std::nearbyint(q.qp[i] + sign * x * coef[i]));
      }
      if (std::abs(active_bits - budget) > tol * total) result.bracket_failed = true;
      solved = true;
      break;
    }
  }

  if (!solved && !active.empty()) {
    // Pass limit exhausted with blocks still active: keep the last root and
    // clamp the stragglers.
    auto side_bits = [&](double v) {
      double sum = 0.0;
      for (size_t i : active) sum += model.bits(q.qp[i] + sign * v * coef[i]);
      return sum;
    };
    active_bits = side_bits(x);
    for (size_t i : active) {
      const double rounded = std::nearbyint(q.qp[i] + sign * x * coef[i]);
      q_out[i] = static_cast<int>(std::clamp(rounded, double(kMinQp), double(kMaxQp)));
    }
    result.bracket_failed = true;
  }

  result.x = x;
  result.model_bits = fixed_bits + frozen_bits + active_bits;
  return result;
}

}  // namespace

SolveResult solve_alpha_beta(const QpMap& q, const RegionMaps& regions, double b,
                             const BitCostModel& model, double tol) {
  if (q.mb_width != regions.mb_width || q.mb_height != regions.mb_height ||
      regions.sn.size() != q.block_count() || regions.sp.size() != q.block_count()) {
    fail(ErrorCode::DIMENSION_MISMATCH, "QP map and region maps differ");
  }
  if (!(b > 0.0) || !(b < 100.0)) fail(ErrorCode::OUT_OF_RANGE, "b must be in (0, 100)");
  if (!(tol > 0.0)) fail(ErrorCode::OUT_OF_RANGE, "tol must be positive");
  for (int qp : q.qp) {
    if (qp < kMinQp || qp > kMaxQp) {
      fail(ErrorCode::OUT_OF_RANGE, "qp " + std::to_string(qp) + " outside [0, 51]");
    }
  }

  SolveResult result;
  result.q_prime = q;

  std::vector<size_t> nonsalient;
  std::vector<size_t> salient;
  for (size_t i = 0; i < q.block_count(); ++i) {
    (regions.sn[i] > 0.0 ? nonsalient : salient).push_back(i);
  }
  if (nonsalient.empty() || salient.empty()) {
    result.status = SolveStatus::EMPTY_REGION;
    return result;
  }

  double total = 0.0;
  for (int qp : q.qp) total += model.bits(qp);
  const double target_n = b / 100.0 * total;
  const double target_p = total - target_n;

  std::vector<int> q_out(q.block_count(), 0);
  SideResult beta_side =
      solve_side(q, nonsalient, regions.sn, -1.0, target_n, model, tol, total, q_out);
  SideResult alpha_side =
      solve_side(q, salient, regions.sp, +1.0, target_p, model, tol, total, q_out);

  result.alpha = alpha_side.x;
  result.beta = beta_side.x;
  result.q_prime.qp = std::move(q_out);
  result.clamped_blocks = beta_side.clamped + alpha_side.clamped;
  const double model_total = beta_side.model_bits + alpha_side.model_bits;
  result.achieved_nonsalient_share =
      model_total > 0.0 ? beta_side.model_bits / model_total : 0.0;
  if (beta_side.bracket_failed || alpha_side.bracket_failed) {
    result.status = SolveStatus::NO_BRACKET;
  }
  return result;
}

std::vector<QpMap> build_qp_maps(int width, int height,
                                 const std::vector<SaliencyMap>& saliency_seq,
                                 int base_qp, double p, double b,
                                 const BitCostModel& model,
                                 std::vector<FrameDiagnostics>* diagnostics) {
  if (base_qp < kMinQp || base_qp > kMaxQp) {
    fail(ErrorCode::OUT_OF_RANGE, "base qp " + std::to_string(base_qp) + " outside [0, 51]");
  }
  for (size_t f = 0; f < saliency_seq.size(); ++f) {
    if (saliency_seq[f].width != width || saliency_seq[f].height != height) {
      fail(ErrorCode::DIMENSION_MISMATCH,
           "saliency map " + std::to_string(f) + " does not match the video dimensions");
    }
  }

  std::vector<QpMap> maps(saliency_seq.size());
  std::vector<FrameDiagnostics> diag(saliency_seq.size());
  parallel_for(static_cast<int64_t>(saliency_seq.size()), [&](int64_t f) {
    const QpMap base = uniform_qp_map(width, height, base_qp);
    RegionMaps regions = region_maps(saliency_seq[static_cast<size_t>(f)], p);
    SolveResult solved = solve_alpha_beta(base, regions, b, model);
    FrameDiagnostics& d = diag[static_cast<size_t>(f)];
    d.frame = static_cast<int>(f);
    d.status = solved.status;
    d.alpha = solved.alpha;
    d.beta = solved.beta;
    d.s_p = regions.s_p;
    d.share = solved.achieved_nonsalient_share;
    d.clamped = solved.clamped_blocks;
    // Degenerate frames keep the uniform base map.
    maps[static_cast<size_t>(f)] =
        solved.status == SolveStatus::EMPTY_REGION ? base : std::move(solved.q_prime);
  });
  if (diagnostics != nullptr) *diagnostics = std::move(diag);
  return maps;
}

}  // namespace salrate

#pragma once

#include <functional>
#include <vector>

#include "salrate/types.hpp"

namespace salrate {

/// Relative bits needed to encode a block at quantizer q, q in [0, 51].
/// Analytic model: 2^(-q/6), halving every 6 QP.
double analytic_bit_cost(int q);

/// Monotone q -> relative bits model, evaluable at real arguments. The
/// analytic form is 2^(-q/6); the LUT form interpolates measured samples
/// log-linearly over integer knots and extrapolates the edge slopes.
class BitCostModel {
 public:
  enum class Kind { ANALYTIC, LUT };

  static BitCostModel analytic();
  /// 52-entry strictly decreasing positive table, one entry per QP.
  static BitCostModel from_lut(const std::vector<double>& bits_per_qp);

  double bits(double q) const;
  Kind kind() const { return kind_; }
  /// LUT entry for integer q (ANALYTIC evaluates the closed form).
  double lut_entry(int q) const;

 private:
  BitCostModel(Kind kind, std::vector<double> log_bits)
      : kind_(kind), log_bits_(std::move(log_bits)) {}

  Kind kind_;
  std::vector<double> log_bits_;  // ln(bits) at integer QPs, LUT mode only
};

/// Mean measured bits per macroblock when encoding `frame` at uniform QP q.
using EncoderProbe =
    std::function<double(const std::vector<uint8_t>& frame, int width, int height, int qp)>;

/// Builds a LUT model by probing q in {0, 6, ..., 48, 51}, pooling adjacent
/// violators into a non-increasing fit, strictifying, and interpolating
/// log-linearly between sample points.
BitCostModel calibrate_bit_cost(const EncoderProbe& probe,
                                const std::vector<uint8_t>& frame, int width,
                                int height);

/// Per-macroblock mean saliency; partial edge blocks average their actual pixels.
struct MacroblockGrid {
  int mb_width = 0;
  int mb_height = 0;
  std::vector<double> values;
};

MacroblockGrid block_saliency(const SaliencyMap& map);

/// sp = max(block_saliency - s_p, 0), sn = max(s_p - block_saliency, 0),
/// where s_p is the p-th percentile of the per-pixel map. Supports are
/// disjoint; blocks at exactly s_p carry sp = sn = 0 and sit on the
/// salient-side constraint set.
struct RegionMaps {
  int mb_width = 0;
  int mb_height = 0;
  std::vector<double> sp;
  std::vector<double> sn;
  std::vector<double> block_sal;
  double s_p = 0.0;

  bool nonsalient(size_t block) const { return sn[block] > 0.0; }
};

RegionMaps region_maps(const SaliencyMap& map, double p);

enum class SolveStatus {
  OK,
  EMPTY_REGION,  // one side empty; the map passes through unmodified
  NO_BRACKET,    // budget unreachable at the QP bounds; best achievable reported
};

struct SolveResult {
  SolveStatus status = SolveStatus::OK;
  double alpha = 0.0;
  double beta = 0.0;
  QpMap q_prime;
  /// Model-predicted fraction of bits in the {SN>0} region, evaluated on the
  /// continuous (pre-rounding) solution with frozen blocks at their clamps.
  double achieved_nonsalient_share = 0.0;
  int clamped_blocks = 0;
};

/// Solves the decoupled budget system: beta so the {SN>0} blocks consume
/// b percent of the model bits of the input map, alpha so the complement
/// consumes the rest. q' = q + alpha*sp - beta*sn, rounded half-to-even and
/// clamped to [0,51]; blocks whose rounded value clamps are frozen at the
/// bound and the affected side re-solves (at most 52 passes).
SolveResult solve_alpha_beta(const QpMap& q, const RegionMaps& regions, double b,
                             const BitCostModel& model, double tol = 1e-9);

struct FrameDiagnostics {
  int frame = 0;
  SolveStatus status = SolveStatus::OK;
  double alpha = 0.0;
  double beta = 0.0;
  double s_p = 0.0;
  double share = 0.0;
  int clamped = 0;
};

/// Per frame: uniform base_qp map -> region_maps -> solve_alpha_beta.
/// Frames with an empty region side pass through at uniform base_qp.
std::vector<QpMap> build_qp_maps(int width, int height,
                                 const std::vector<SaliencyMap>& saliency_seq,
                                 int base_qp, double p, double b,
                                 const BitCostModel& model,
                                 std::vector<FrameDiagnostics>* diagnostics = nullptr);

}  // namespace salrate

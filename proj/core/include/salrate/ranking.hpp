#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "salrate/types.hpp"

namespace salrate {

/// Inverse standard normal CDF. Rational approximation refined with one
/// Newton step; absolute error below 1e-9 for p in [1e-6, 1-1e-6].
double inverse_normal_cdf(double p);

/// Standard normal CDF (via erfc).
double normal_cdf(double x);

/// A hidden check: the expected outcome for one (item, method pair).
struct VerificationQuestion {
  std::string item_id;
  std::string method_a;
  std::string method_b;
  Outcome required = Outcome::TIE;
};

struct FilterResult {
  std::vector<ComparisonRecord> records;
  int dropped_failed = 0;   // participants who answered a check incorrectly
  int dropped_missing = 0;  // participants with no verification record at all
};

/// Keeps only records from participants whose every verification answer was
/// correct; verification records themselves are removed from the output.
/// Matching is orderless on the method pair (the required outcome flips when
/// the record lists the pair swapped). An empty question set keeps everything.
FilterResult filter_participants(const std::vector<ComparisonRecord>& records,
                                 const std::vector<VerificationQuestion>& questions);

/// Aggregated pairwise wins. Ties contribute 0.5 to each side. Method order
/// is first-appearance order in the record stream.
struct PreferenceMatrix {
  std::vector<std::string> methods;
  std::vector<double> wins;    // n*n, row beats column
  std::vector<double> totals;  // n*n, symmetric

  int method_count() const { return static_cast<int>(methods.size()); }
  double win(int i, int j) const { return wins[static_cast<size_t>(i) * methods.size() + j]; }
  double total(int i, int j) const { return totals[static_cast<size_t>(i) * methods.size() + j]; }
};

PreferenceMatrix build_matrix(const std::vector<ComparisonRecord>& records);
/// Same, over a fixed method list (methods absent from the records keep
/// zero counts). Used by bootstrap replicates.
PreferenceMatrix build_matrix(const std::vector<ComparisonRecord>& records,
                              const std::vector<std::string>& methods);

/// Thurstone Case V scale values, mean-centered, aligned with m.methods.
/// Win proportions clamp to [1/(2n), 1 - 1/(2n)] before the probit
/// transform; incomplete designs are accepted as long as the comparison
/// graph is connected (the scale averages over observed pairs).
std::vector<double> thurstone_case_v(const PreferenceMatrix& m);

struct RankResult {
  std::vector<std::string> methods;
  std::vector<double> scale;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  int n_bootstrap = 0;
};

/// Percentile bootstrap over participant-level resampling. Deterministic for
/// a fixed seed and independent of thread count; replicates whose comparison
/// graph degenerates are redrawn, at most 10 attempts each.
RankResult bootstrap_ci(const std::vector<ComparisonRecord>& records, double level,
                        int n_boot, uint64_t seed);

/// CSV lines `method,scale,ci_low,ci_high`, header included.
std::string rank_result_csv(const RankResult& result);

}  // namespace salrate

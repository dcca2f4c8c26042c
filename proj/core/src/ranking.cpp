#include "salrate/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "salrate/error.hpp"
#include "salrate/parallel.hpp"

namespace salrate {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inverse_normal_cdf(double p) {
  if (!(p > 0.0) || !(p < 1.0)) fail(ErrorCode::OUT_OF_RANGE, "p must be in (0, 1)");

  // Acklam's rational approximation, then one Newton refinement.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double err = normal_cdf(x) - p;
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  if (pdf > 0.0) x -= err / pdf;
  return x;
}

namespace {

// Orderless match of a record against a question; flips the required outcome
// when the record lists the pair swapped.
bool matches_question(const ComparisonRecord& rec, const VerificationQuestion& q,
                      Outcome& required_as_recorded) {
  if (rec.item_id != q.item_id) return false;
  if (rec.method_a == q.method_a && rec.method_b == q.method_b) {
    required_as_recorded = q.required;
    return true;
  }
  if (rec.method_a == q.method_b && rec.method_b == q.method_a) {
    switch (q.required) {
      case Outcome::A_WINS: required_as_recorded = Outcome::B_WINS; break;
      case Outcome::B_WINS: required_as_recorded = Outcome::A_WINS; break;
      case Outcome::TIE: required_as_recorded = Outcome::TIE; break;
    }
    return true;
  }
  return false;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Ceil-rank quantile of a sorted sample.
double sorted_quantile(const std::vector<double>& sorted, double q) {
  const size_t n = sorted.size();
  double rank = std::ceil(q * static_cast<double>(n));
  size_t index = rank <= 1.0 ? 0 : static_cast<size_t>(rank) - 1;
  return sorted[std::min(index, n - 1)];
}

}  // namespace

FilterResult filter_participants(const std::vector<ComparisonRecord>& records,
                                 const std::vector<VerificationQuestion>& questions) {
  FilterResult result;
  if (questions.empty()) {
    result.records = records;
    return result;
  }

  struct Status {
    bool has_check = false;
    bool failed = false;
  };
  std::map<std::string, Status> by_participant;
  std::vector<bool> is_check(records.size(), false);

  for (size_t i = 0; i < records.size(); ++i) {
    const ComparisonRecord& rec = records[i];
    Status& status = by_participant[rec.participant_id];
    for (const VerificationQuestion& q : questions) {
      Outcome required = Outcome::TIE;
      if (matches_question(rec, q, required)) {
        is_check[i] = true;
        status.has_check = true;
        if (rec.outcome != required) status.failed = true;
        break;
      }
    }
  }

  for (const auto& [participant, status] : by_participant) {
    if (!status.has_check) ++result.dropped_missing;
    else if (status.failed) ++result.dropped_failed;
  }
  for (size_t i = 0; i < records.size(); ++i) {
    if (is_check[i]) continue;
    const Status& status = by_participant[records[i].participant_id];
    if (status.has_check && !status.failed) result.records.push_back(records[i]);
  }
  return result;
}

PreferenceMatrix build_matrix(const std::vector<ComparisonRecord>& records,
                              const std::vector<std::string>& methods) {
  if (records.empty()) fail(ErrorCode::EMPTY_INPUT, "no comparison records");
  PreferenceMatrix m;
  m.methods = methods;
  const size_t n = methods.size();
  m.wins.assign(n * n, 0.0);
  m.totals.assign(n * n, 0.0);

  std::map<std::string, size_t> index;
  for (size_t i = 0; i < n; ++i) index[methods[i]] = i;

  for (const ComparisonRecord& rec : records) {
    auto ia = index.find(rec.method_a);
    auto ib = index.find(rec.method_b);
    if (ia == index.end() || ib == index.end()) {
      fail(ErrorCode::MISSING_PAIR, "method not in the fixed method list");
    }
    const size_t a = ia->second;
    const size_t b = ib->second;
    if (a == b) fail(ErrorCode::BAD_ROW, "self-comparison for " + rec.method_a);
    switch (rec.outcome) {
      case Outcome::A_WINS: m.wins[a * n + b] += 1.0; break;
      case Outcome::B_WINS: m.wins[b * n + a] += 1.0; break;
      case Outcome::TIE:
        m.wins[a * n + b] += 0.5;
        m.wins[b * n + a] += 0.5;
        break;
    }
    m.totals[a * n + b] += 1.0;
    m.totals[b * n + a] += 1.0;
  }
  return m;
}

PreferenceMatrix build_matrix(const std::vector<ComparisonRecord>& records) {
  if (records.empty()) fail(ErrorCode::EMPTY_INPUT, "no comparison records");
  std::vector<std::string> methods;
  std::map<std::string, bool> seen;
  for (const ComparisonRecord& rec : records) {
    if (!seen[rec.method_a]) {
      seen[rec.method_a] = true;
      methods.push_back(rec.method_a);
    }
    if (!seen[rec.method_b]) {
      seen[rec.method_b] = true;
      methods.push_back(rec.method_b);
    }
  }
  return build_matrix(records, methods);
}

std::vector<double> thurstone_case_v(const PreferenceMatrix& m) {
  const int n = m.method_count();
  if (n < 2) fail(ErrorCode::MISSING_PAIR, "need at least two methods");

  std::vector<int> degree(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && m.total(i, j) > 0.0) ++degree[static_cast<size_t>(i)];
    }
  }
  for (int i = 0; i < n; ++i) {
    if (degree[static_cast<size_t>(i)] == 0) {
      fail(ErrorCode::MISSING_PAIR, "method '" + m.methods[static_cast<size_t>(i)] +
                                        "' has no observed pairs");
    }
  }

  // Connectivity over observed pairs.
  std::vector<bool> reached(static_cast<size_t>(n), false);
  std::vector<int> stack{0};
  reached[0] = true;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      if (!reached[static_cast<size_t>(j)] && i != j && m.total(i, j) > 0.0) {
        reached[static_cast<size_t>(j)] = true;
        stack.push_back(j);
      }
    }
  }
  for (bool r : reached) {
    if (!r) fail(ErrorCode::DISCONNECTED_GRAPH, "comparison graph is not connected");
  }

  // Classical least-squares solution: scale_i is the mean of row i of the
  // z matrix including the zero diagonal; unobserved pairs are skipped and
  // the divisor shrinks with them.
  std::vector<double> scale(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double total = m.total(i, j);
      if (!(total > 0.0)) continue;
      const double clamp_lo = 1.0 / (2.0 * total);
      const double p = std::clamp(m.win(i, j) / total, clamp_lo, 1.0 - clamp_lo);
      sum += inverse_normal_cdf(p);
    }
    scale[static_cast<size_t>(i)] = sum / (degree[static_cast<size_t>(i)] + 1);
  }

  double mean = 0.0;
  for (double s : scale) mean += s;
  mean /= n;
  for (double& s : scale) s -= mean;
  return scale;
}

RankResult bootstrap_ci(const std::vector<ComparisonRecord>& records, double level,
                        int n_boot, uint64_t seed) {
  if (!(level > 0.0) || !(level < 1.0)) fail(ErrorCode::OUT_OF_RANGE, "level must be in (0, 1)");
  if (n_boot < 100) fail(ErrorCode::OUT_OF_RANGE, "n_boot must be at least 100");

  PreferenceMatrix full = build_matrix(records);
  std::vector<double> point = thurstone_case_v(full);
  const size_t n_methods = full.methods.size();

  // Participant pools in first-appearance order.
  std::vector<std::string> participants;
  std::map<std::string, size_t> participant_index;
  std::vector<std::vector<size_t>> records_of;
  for (size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] =
        participant_index.emplace(records[i].participant_id, participants.size());
    if (inserted) {
      participants.push_back(records[i].participant_id);
      records_of.emplace_back();
    }
    records_of[it->second].push_back(i);
  }
  const size_t n_participants = participants.size();

  std::vector<std::vector<double>> replicate_scales(static_cast<size_t>(n_boot));
  // One byte per replicate: workers write concurrently, and the packed
  // vector<bool> specialization would race on neighboring bits.
  std::vector<uint8_t> replicate_ok(static_cast<size_t>(n_boot), 0);

  parallel_for(n_boot, [&](int64_t r) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<uint64_t>(r) + 1)));
    std::uniform_int_distribution<size_t> pick(0, n_participants - 1);
    for (int attempt = 0; attempt < 10; ++attempt) {
      std::vector<ComparisonRecord> sample;
      sample.reserve(records.size());
      for (size_t k = 0; k < n_participants; ++k) {
        for (size_t idx : records_of[pick(rng)]) sample.push_back(records[idx]);
      }
      try {
        PreferenceMatrix m = build_matrix(sample, full.methods);
        replicate_scales[static_cast<size_t>(r)] = thurstone_case_v(m);
        replicate_ok[static_cast<size_t>(r)] = 1;
        break;
      } catch (const Error&) {
        // degenerate replicate (missing pair or disconnected); redraw
      }
    }
  });

  for (uint8_t ok : replicate_ok) {
    if (!ok) {
      fail(ErrorCode::DISCONNECTED_GRAPH,
           "bootstrap replicate stayed degenerate after 10 redraws");
    }
  }

  RankResult result;
  result.methods = full.methods;
  result.scale = point;
  result.n_bootstrap = n_boot;
  result.ci_low.resize(n_methods);
  result.ci_high.resize(n_methods);
  const double tail = (1.0 - level) / 2.0;
  std::vector<double> column(static_cast<size_t>(n_boot));
  for (size_t m = 0; m < n_methods; ++m) {
    for (int r = 0; r < n_boot; ++r) {
      column[static_cast<size_t>(r)] = replicate_scales[static_cast<size_t>(r)][m];
    }
    std::sort(column.begin(), column.end());
    double lo = sorted_quantile(column, tail);
    double hi = sorted_quantile(column, 1.0 - tail);
    // Percentile intervals may miss the point estimate on skewed data; the
    // reported interval always contains it.
    result.ci_low[m] = std::min(lo, point[m]);
    result.ci_high[m] = std::max(hi, point[m]);
  }
  return result;
}

std::string rank_result_csv(const RankResult& result) {
  std::string csv = "method,scale,ci_low,ci_high\n";
  char buf[160];
  for (size_t i = 0; i < result.methods.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g\n", result.methods[i].c_str(),
                  result.scale[i], result.ci_low[i], result.ci_high[i]);
    csv += buf;
  }
  return csv;
}

}  // namespace salrate

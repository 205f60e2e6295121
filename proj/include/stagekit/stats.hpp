#pragma once

#include <vector>

namespace stagekit::stats {

struct TestResult {
  double w_statistic = 0;  // sum of ranks of positive differences
  double z = 0;            // normal approximation with continuity correction
  double p_raw = 1;
  double p_adjusted = 1;   // filled by the caller after Holm adjustment
  double effect_r = 0;     // z / sqrt(n_effective)
  int n_effective = 0;
  bool exact = false;      // p from exact sign-pattern enumeration
};

/// One-sided paired Wilcoxon signed-rank test of a > b. Zero differences are
/// dropped, |d| ranks use midranks. Exact enumeration for n <= 12, otherwise
/// a tie-corrected normal approximation with continuity correction.
TestResult wilcoxon_one_sided(const std::vector<double>& a, const std::vector<double>& b);

/// Holm-Bonferroni step-down adjustment, returned in input order.
std::vector<double> holm_adjust(const std::vector<double>& p_values);

double median(std::vector<double> values);

/// Per-item absolute deviation from the median.
std::vector<double> consistency_deviation(const std::vector<double>& values);

}  // namespace stagekit::stats

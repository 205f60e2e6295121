#include "stagekit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "stagekit/error.hpp"

namespace stagekit::stats {

namespace {

constexpr int kExactCutoff = 12;

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

TestResult wilcoxon_one_sided(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) fail(ErrorCode::ShapeError, "paired samples disagree on length");

  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  const int n = static_cast<int>(diffs.size());
  if (n < 5) {
    fail(ErrorCode::TooFewPairs,
         "only " + std::to_string(n) + " nonzero differences, need at least 5");
  }

  // Midranks of |d|.
  std::vector<std::size_t> order(diffs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(diffs[x]) < std::abs(diffs[y]);
  });
  std::vector<double> rank(diffs.size());
  std::map<double, int> tie_sizes;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() &&
           std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) {
      ++j;
    }
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = midrank;
    tie_sizes[std::abs(diffs[order[i]])] = static_cast<int>(j - i + 1);
    i = j + 1;
  }

  double w_plus = 0.0;
  for (std::size_t k = 0; k < diffs.size(); ++k) {
    if (diffs[k] > 0.0) w_plus += rank[k];
  }

  const double mean = static_cast<double>(n) * (n + 1) / 4.0;
  double variance = static_cast<double>(n) * (n + 1) * (2 * n + 1) / 24.0;
  for (const auto& [value, t] : tie_sizes) {
    variance -= static_cast<double>(t) * (static_cast<double>(t) * t - 1.0) / 48.0;
  }

  TestResult result;
  result.w_statistic = w_plus;
  result.n_effective = n;
  result.z = (w_plus - mean - 0.5) / std::sqrt(variance);
  result.effect_r = result.z / std::sqrt(static_cast<double>(n));

  if (n <= kExactCutoff) {
    // Exact null distribution over every sign assignment of the ranks.
    const std::uint64_t patterns = std::uint64_t{1} << n;
    std::uint64_t at_least = 0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      double w = 0.0;
      for (int bit = 0; bit < n; ++bit) {
        if (mask & (std::uint64_t{1} << bit)) w += rank[static_cast<std::size_t>(bit)];
      }
      if (w >= w_plus - 1e-9) ++at_least;
    }
    result.p_raw = static_cast<double>(at_least) / static_cast<double>(patterns);
    result.exact = true;
  } else {
    result.p_raw = normal_sf(result.z);
    result.exact = false;
  }
  result.p_adjusted = result.p_raw;
  return result;
}

std::vector<double> holm_adjust(const std::vector<double>& p_values) {
  const std::size_t m = p_values.size();
  for (double p : p_values) {
    if (!(p > 0.0) || p > 1.0) fail(ErrorCode::ConfigError, "p-values must lie in (0,1]");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

  std::vector<double> adjusted(m);
  double running_max = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double scaled = std::min(1.0, static_cast<double>(m - j) * p_values[order[j]]);
    running_max = std::max(running_max, scaled);
    adjusted[order[j]] = running_max;
  }
  return adjusted;
}

double median(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::EmptyInput, "median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<double> consistency_deviation(const std::vector<double>& values) {
  const double m = median(values);
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(std::abs(v - m));
  return out;
}

}  // namespace stagekit::stats

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "stagekit/stats.hpp"
#include "stagekit/error.hpp"

using namespace stagekit;
using stats::TestResult;

namespace {

// Brute-force exact one-sided p over all 2^n sign patterns with midranks.
double exact_oracle(std::vector<double> diffs) {
  std::erase_if(diffs, [](double d) { return d == 0.0; });
  const std::size_t n = diffs.size();
  std::vector<double> mags(n);
  for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(diffs[i]);
  // Midranks of |d|.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return mags[a] < mags[b]; });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && mags[order[j + 1]] == mags[order[i]]) ++j;
    double mid = 0.5 * (i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double observed = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (diffs[k] > 0) observed += rank[k];

  long ge = 0;
  long total = 1L << n;
  for (long mask = 0; mask < total; ++mask) {
    double w = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (1L << k)) w += rank[k];
    if (w >= observed - 1e-9) ++ge;
  }
  return static_cast<double>(ge) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("five strictly positive differences give exact p = 1/32") {
  std::vector<double> a = {5, 6, 7, 8, 9};
  std::vector<double> b = {1, 2, 3, 4, 5.5};
  TestResult r = stats::wilcoxon_one_sided(a, b);
  CHECK(r.exact);
  CHECK(r.n_effective == 5);
  CHECK(r.w_statistic == doctest::Approx(15.0));
  CHECK(r.p_raw == doctest::Approx(1.0 / 32.0));
  CHECK(r.effect_r == doctest::Approx(r.z / std::sqrt(5.0)));
}

TEST_CASE("swapping the samples flips the exact one-sided p") {
  std::mt19937 rng(17);
  std::normal_distribution<double> g(0.3, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(6), b(6);
    for (int i = 0; i < 6; ++i) {
      b[i] = g(rng);
      a[i] = b[i] + g(rng);
    }
    bool any_zero = false;
    for (int i = 0; i < 6; ++i) any_zero |= (a[i] == b[i]);
    if (any_zero) continue;
    double p_fwd = stats::wilcoxon_one_sided(a, b).p_raw;
    double p_rev = stats::wilcoxon_one_sided(b, a).p_raw;
    // P(W >= w) + P(W >= S - w + point mass correction) spans the whole space:
    // forward counts w' >= w, reverse counts w' <= w, overlapping exactly at w.
    std::vector<double> diffs(6);
    for (int i = 0; i < 6; ++i) diffs[i] = a[i] - b[i];
    double point_mass = exact_oracle(diffs) + exact_oracle([&] {
                          std::vector<double> neg(6);
                          for (int i = 0; i < 6; ++i) neg[i] = -diffs[i];
                          return neg;
                        }()) -
                        1.0;
    CHECK(p_fwd + p_rev == doctest::Approx(1.0 + point_mass).epsilon(1e-12));
  }
}

TEST_CASE("exact p matches the brute-force enumeration oracle") {
  std::mt19937 rng(23);
  std::normal_distribution<double> g(0.2, 1.0);
  std::uniform_int_distribution<int> n_pick(5, 12);
  std::uniform_int_distribution<int> tie_pick(0, 3);
  for (int trial = 0; trial < 300; ++trial) {
    int n = n_pick(rng);
    std::vector<double> a(n), b(n), diffs(n);
    for (int i = 0; i < n; ++i) {
      b[i] = g(rng);
      // Quantize some differences to force tied magnitudes.
      double d = tie_pick(rng) == 0 ? std::round(g(rng) * 2) / 2.0 : g(rng);
      // Quantized magnitudes only stay tied if b + d - b is exact, so snap b
      // to the same grid when d is quantized.
      if (tie_pick(rng) < 2) b[i] = std::round(b[i] * 2) / 2.0;
      a[i] = b[i] + d;
      diffs[i] = a[i] - b[i];
    }
    int zeros = static_cast<int>(std::count(diffs.begin(), diffs.end(), 0.0));
    if (n - zeros < 5) continue;
    TestResult r = stats::wilcoxon_one_sided(a, b);
    CHECK(r.exact);
    CHECK(r.p_raw == doctest::Approx(exact_oracle(diffs)).epsilon(1e-12));
  }
}

TEST_CASE("exact and normal branches agree near n = 12") {
  std::mt19937 rng(29);
  std::normal_distribution<double> g(0.4, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> a(12), b(12), diffs(12);
    for (int i = 0; i < 12; ++i) {
      b[i] = g(rng);
      a[i] = b[i] + g(rng);
      diffs[i] = a[i] - b[i];
    }
    if (std::count(diffs.begin(), diffs.end(), 0.0) > 0) continue;
    TestResult r = stats::wilcoxon_one_sided(a, b);
    REQUIRE(r.exact);
    // Normal approximation with continuity correction from the same W.
    double n = 12;
    double mean = n * (n + 1) / 4.0;
    double sd = std::sqrt(n * (n + 1) * (2 * n + 1) / 24.0);
    double z = (r.w_statistic - mean - 0.5) / sd;
    double p_normal = 0.5 * std::erfc(z / std::sqrt(2.0));
    CHECK(std::abs(r.p_raw - p_normal) <= 0.01);
  }
}

TEST_CASE("large samples use the tie-corrected normal approximation") {
  std::mt19937 rng(41);
  std::normal_distribution<double> g(0.5, 1.0);
  std::vector<double> a(40), b(40);
  for (int i = 0; i < 40; ++i) {
    b[i] = g(rng);
    a[i] = b[i] + std::abs(g(rng)) + 0.01;
  }
  TestResult r = stats::wilcoxon_one_sided(a, b);
  CHECK_FALSE(r.exact);
  CHECK(r.n_effective == 40);
  CHECK(r.p_raw < 1e-6);           // every difference positive
  CHECK(r.z > 0);
  double p_rev = stats::wilcoxon_one_sided(b, a).p_raw;
  CHECK(p_rev > 0.999);
}

TEST_CASE("zero differences are dropped; fewer than five pairs is an error") {
  std::vector<double> a = {1, 2, 3, 4, 5, 6};
  std::vector<double> same = a;
  try {
    (void)stats::wilcoxon_one_sided(a, same);
    FAIL("expected TooFewPairs");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewPairs);
  }

  std::vector<double> b = {1, 2, 3, 3, 4, 5};  // two zero differences remain -> n=4...
  std::vector<double> c = {0, 1, 2, 3, 4, 5};
  // 6 pairs, one zero difference -> n = 5, still allowed.
  std::vector<double> d = {0, 1.5, 2.5, 3.5, 4.5, 5.5};
  TestResult r = stats::wilcoxon_one_sided(d, c);
  CHECK(r.n_effective == 5);
  (void)b;
}

TEST_CASE("Holm adjustment: worked example and properties") {
  auto adjusted = stats::holm_adjust({0.01, 0.04, 0.03});
  REQUIRE(adjusted.size() == 3);
  CHECK(adjusted[0] == doctest::Approx(0.03));
  CHECK(adjusted[1] == doctest::Approx(0.06));
  CHECK(adjusted[2] == doctest::Approx(0.06));

  // Monotone, capped at 1, never smaller than raw.
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> u(1e-6, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p(8);
    for (double& v : p) v = u(rng);
    auto adj = stats::holm_adjust(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(adj[i] >= p[i]);
      CHECK(adj[i] <= 1.0);
    }
    // Order-preserving on the sorted sequence.
    std::vector<std::size_t> order(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return p[x] < p[y]; });
    for (std::size_t i = 1; i < order.size(); ++i)
      CHECK(adj[order[i]] >= adj[order[i - 1]] - 1e-15);
  }

  CHECK_THROWS_AS((void)stats::holm_adjust({0.5, 1.5}), Error);
  CHECK_THROWS_AS((void)stats::holm_adjust({0.0}), Error);
}

TEST_CASE("median and consistency deviation") {
  CHECK(stats::median({3, 1, 2}) == doctest::Approx(2.0));
  CHECK(stats::median({4, 1, 3, 2}) == doctest::Approx(2.5));
  auto dev = stats::consistency_deviation({0.8, 0.9, 0.7, 0.6});
  // median = 0.75
  CHECK(dev[0] == doctest::Approx(0.05));
  CHECK(dev[1] == doctest::Approx(0.15));
  CHECK(dev[2] == doctest::Approx(0.05));
  CHECK(dev[3] == doctest::Approx(0.15));
}

#pragma once

#include <optional>

#include "stagekit/types.hpp"

namespace stagekit::markers {

enum class RateDenominator { Tst, Tib };

struct MarkerReport {
  double tst_min = 0;
  double waso_min = 0;
  double n1_min = 0;
  double n2_min = 0;
  double n3_min = 0;
  double rem_min = 0;
  std::optional<double> reml_min;  // absent when no REM epoch follows onset
  double awh_per_hour = 0;
  double trh_per_hour = 0;
  long awakenings = 0;
  long transitions = 0;
};

/// Derive clinical markers from a hypnogram. Sleep onset is the first
/// non-wake scored epoch, offset the last. Awakenings are sleep-to-wake
/// changes starting within [onset, offset]; transitions are stage changes
/// between time-adjacent scored epochs over the whole recording.
MarkerReport derive_markers(const Hypnogram& h,
                            RateDenominator denominator = RateDenominator::Tst);

struct MarkerBias {
  double tst_min = 0;
  double waso_min = 0;
  double n1_min = 0;
  double n2_min = 0;
  double n3_min = 0;
  double rem_min = 0;
  std::optional<double> reml_min;  // absent when either REML is absent
  double awh_per_hour = 0;
  double trh_per_hour = 0;
};

/// Elementwise prediction minus reference; underestimation comes out negative.
MarkerBias marker_bias(const MarkerReport& pred, const MarkerReport& ref);

}  // namespace stagekit::markers

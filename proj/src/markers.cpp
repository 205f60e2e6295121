#include "stagekit/markers.hpp"

#include <vector>

namespace stagekit::markers {

MarkerReport derive_markers(const Hypnogram& h, RateDenominator denominator) {
  validate(h);
  const double epoch_min = h.epoch_duration_s / 60.0;
  const std::size_t t_count = h.size();

  std::size_t onset = t_count;
  std::size_t offset = t_count;
  for (std::size_t t = 0; t < t_count; ++t) {
    const Stage s = h.stages[t];
    if (is_scored(s) && s != Stage::Wake) {
      if (onset == t_count) onset = t;
      offset = t;
    }
  }
  if (onset == t_count) fail(ErrorCode::NoSleep, "recording contains no sleep epochs");

  MarkerReport report;
  long scored_epochs = 0;
  std::optional<std::size_t> first_rem;
  for (std::size_t t = 0; t < t_count; ++t) {
    switch (h.stages[t]) {
      case Stage::N1: report.n1_min += epoch_min; break;
      case Stage::N2: report.n2_min += epoch_min; break;
      case Stage::N3: report.n3_min += epoch_min; break;
      case Stage::Rem:
        report.rem_min += epoch_min;
        if (!first_rem && t >= onset) first_rem = t;
        break;
      default: break;
    }
    if (is_scored(h.stages[t])) ++scored_epochs;
    if (h.stages[t] == Stage::Wake && t > onset && t < offset) {
      report.waso_min += epoch_min;
    }
  }
  report.tst_min = report.n1_min + report.n2_min + report.n3_min + report.rem_min;
  if (first_rem) {
    report.reml_min = static_cast<double>(*first_rem - onset) * epoch_min;
  }

  // Transitions only between consecutive scored epochs; MASK breaks adjacency.
  for (std::size_t t = 0; t + 1 < t_count; ++t) {
    const Stage a = h.stages[t];
    const Stage b = h.stages[t + 1];
    if (!is_scored(a) || !is_scored(b)) continue;
    if (a != b) {
      ++report.transitions;
      if (b == Stage::Wake && t >= onset && t <= offset) ++report.awakenings;
    }
  }

  const double denom_hours =
      (denominator == RateDenominator::Tst
           ? report.tst_min
           : static_cast<double>(scored_epochs) * epoch_min) /
      60.0;
  report.awh_per_hour = static_cast<double>(report.awakenings) / denom_hours;
  report.trh_per_hour = static_cast<double>(report.transitions) / denom_hours;
  return report;
}

MarkerBias marker_bias(const MarkerReport& pred, const MarkerReport& ref) {
  MarkerBias bias;
  bias.tst_min = pred.tst_min - ref.tst_min;
  bias.waso_min = pred.waso_min - ref.waso_min;
  bias.n1_min = pred.n1_min - ref.n1_min;
  bias.n2_min = pred.n2_min - ref.n2_min;
  bias.n3_min = pred.n3_min - ref.n3_min;
  bias.rem_min = pred.rem_min - ref.rem_min;
  if (pred.reml_min && ref.reml_min) {
    bias.reml_min = *pred.reml_min - *ref.reml_min;
  }
  bias.awh_per_hour = pred.awh_per_hour - ref.awh_per_hour;
  bias.trh_per_hour = pred.trh_per_hour - ref.trh_per_hour;
  return bias;
}

}  // namespace stagekit::markers

#include "stagekit/metrics.hpp"

#include <cmath>

namespace stagekit::metrics {

void ConfusionMatrix::add(const ConfusionMatrix& other) {
  for (std::size_t r = 0; r < kNumStages; ++r) {
    for (std::size_t p = 0; p < kNumStages; ++p) counts[r][p] += other.counts[r][p];
  }
  total += other.total;
}

ConfusionMatrix confusion(const Hypnogram& reference, const Hypnogram& prediction) {
  validate(reference);
  validate(prediction);
  if (reference.size() != prediction.size()) {
    fail(ErrorCode::AlignmentError, "reference and prediction disagree on epoch count");
  }
  ConfusionMatrix cm;
  for (std::size_t t = 0; t < reference.size(); ++t) {
    const Stage r = reference.stages[t];
    const Stage p = prediction.stages[t];
    if (!is_scored(r) || !is_scored(p)) continue;
    ++cm.counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(p)];
    ++cm.total;
  }
  if (cm.total == 0) fail(ErrorCode::NoScoredEpochs, "no co-scored epochs");
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  if (cm.total == 0) fail(ErrorCode::NoScoredEpochs, "empty confusion matrix");
  std::int64_t trace = 0;
  for (std::size_t c = 0; c < kNumStages; ++c) trace += cm.counts[c][c];
  return static_cast<double>(trace) / static_cast<double>(cm.total);
}

std::optional<double> class_f1(const ConfusionMatrix& cm, Stage stage) {
  if (!is_scored(stage)) fail(ErrorCode::InvalidStage, "class_f1 of MASK is undefined");
  const std::size_t c = static_cast<std::size_t>(stage);
  std::int64_t tp = cm.counts[c][c];
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  for (std::size_t other = 0; other < kNumStages; ++other) {
    if (other == c) continue;
    fp += cm.counts[other][c];
    fn += cm.counts[c][other];
  }
  if (tp + fp + fn == 0) return std::nullopt;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

double macro_f1(const ConfusionMatrix& cm, AbsentPolicy absent) {
  double sum = 0.0;
  int included = 0;
  for (std::size_t c = 0; c < kNumStages; ++c) {
    const auto f1 = class_f1(cm, static_cast<Stage>(c));
    if (f1) {
      sum += *f1;
      ++included;
    } else if (absent == AbsentPolicy::Zero) {
      ++included;
    }
  }
  if (included == 0) fail(ErrorCode::NoScoredEpochs, "every class is absent");
  return sum / static_cast<double>(included);
}

double cohens_kappa(const ConfusionMatrix& cm) {
  if (cm.total == 0) fail(ErrorCode::NoScoredEpochs, "empty confusion matrix");
  const double total = static_cast<double>(cm.total);
  double trace = 0.0;
  double chance = 0.0;
  for (std::size_t c = 0; c < kNumStages; ++c) {
    trace += static_cast<double>(cm.counts[c][c]);
    std::int64_t row = 0;
    std::int64_t col = 0;
    for (std::size_t o = 0; o < kNumStages; ++o) {
      row += cm.counts[c][o];
      col += cm.counts[o][c];
    }
    chance += static_cast<double>(row) * static_cast<double>(col);
  }
  const double p_o = trace / total;
  const double p_e = chance / (total * total);
  if (p_e >= 1.0) {
    fail(ErrorCode::DegenerateKappa, "both raters are constant on a single class");
  }
  return (p_o - p_e) / (1.0 - p_e);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::ShapeError, "vectors disagree on length");
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    norm_a += a[i] * a[i];
    norm_b += b[i] * b[i];
  }
  if (norm_a == 0.0 || norm_b == 0.0) fail(ErrorCode::ZeroVector, "zero vector");
  return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

double acs(const Hypnodensity& a, const Hypnodensity& b,
           const std::vector<std::size_t>* epochs) {
  if (a.size() != b.size()) fail(ErrorCode::AlignmentError, "hypnodensities disagree on epochs");
  double sum = 0.0;
  std::size_t counted = 0;
  auto accumulate = [&](std::size_t t) {
    sum += cosine_similarity(a.probs[t], b.probs[t]);
    ++counted;
  };
  if (epochs) {
    for (std::size_t t : *epochs) {
      if (t >= a.size()) fail(ErrorCode::ShapeError, "epoch index out of range");
      accumulate(t);
    }
  } else {
    for (std::size_t t = 0; t < a.size(); ++t) accumulate(t);
  }
  if (counted == 0) fail(ErrorCode::NoScoredEpochs, "empty epoch set");
  return sum / static_cast<double>(counted);
}

}  // namespace stagekit::metrics

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stagekit/types.hpp"

namespace stagekit::metrics {

struct ConfusionMatrix {
  // rows = reference stage, columns = predicted stage
  std::array<std::array<std::int64_t, kNumStages>, kNumStages> counts{};
  std::int64_t total = 0;

  void add(const ConfusionMatrix& other);
};

/// Counts over epochs unmasked in both hypnograms.
ConfusionMatrix confusion(const Hypnogram& reference, const Hypnogram& prediction);

double accuracy(const ConfusionMatrix& cm);

/// F1 for one stage, or nullopt when the stage occurs in neither the
/// reference nor the prediction (TP+FP+FN == 0).
std::optional<double> class_f1(const ConfusionMatrix& cm, Stage stage);

enum class AbsentPolicy { Exclude, Zero };

double macro_f1(const ConfusionMatrix& cm, AbsentPolicy absent = AbsentPolicy::Exclude);

double cohens_kappa(const ConfusionMatrix& cm);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Mean per-epoch cosine similarity. When `epochs` is given, only those
/// indices contribute.
double acs(const Hypnodensity& a, const Hypnodensity& b,
           const std::vector<std::size_t>* epochs = nullptr);

}  // namespace stagekit::metrics

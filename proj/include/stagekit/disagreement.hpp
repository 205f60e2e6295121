#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stagekit/types.hpp"

namespace stagekit::disagreement {

/// Shannon entropy in nats, with 0·log 0 = 0. Bounded by ln 5 for stage rows.
double shannon_entropy(std::span<const double> p);

/// {1 - cosine similarity} over all unique member pairs, size M(M-1)/2.
std::vector<double> pairwise_cosine_distances(const std::vector<StageProbs>& members);

struct EpochFeatures {
  double entropy = 0;
  double d_mean = 0;
  double d_std = 0;
  double d_max = 0;
};

/// Entropy of the soft-vote row plus summary statistics of the members'
/// pairwise cosine distances, per epoch.
std::vector<EpochFeatures> epoch_features(const std::vector<const Hypnodensity*>& members);

/// Scores along the leading eigenvector of the 3x3 covariance of the
/// centered rows; the loading on the first column is fixed nonnegative.
std::vector<double> first_principal_component(
    const std::vector<std::array<double, 3>>& features);

struct LogisticModel {
  std::vector<double> weights;
  double intercept = 0;
  std::vector<double> feature_mean;
  std::vector<double> feature_std;
  std::vector<std::size_t> kept_features;  // columns with non-constant values

  double predict(std::span<const double> features) const;
};

/// Deterministic damped-Newton fit of an L2-regularized logistic regression
/// on internally standardized features. Constant features are dropped and
/// recorded in `kept_features`.
LogisticModel fit_logistic(const std::vector<std::vector<double>>& x,
                           const std::vector<int>& y, double lambda = 1e-4,
                           int max_iterations = 500, double gradient_tolerance = 1e-8);

/// Regularized negative log-likelihood of a parameter vector on standardized
/// features, the objective fit_logistic minimizes.
double logistic_objective(const std::vector<std::vector<double>>& x,
                          const std::vector<int>& y, std::span<const double> weights,
                          double intercept, double lambda);

/// Mann-Whitney rank ROC-AUC with ties counted 0.5.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct RecordingFeatures {
  std::string recording_id;
  std::vector<std::vector<double>> x;
  std::vector<int> y;
};

enum class FeatureSet { Entropy, Distance, Both };

struct LoroResult {
  struct Fold {
    std::string recording_id;
    std::optional<double> auc;  // absent when the held-out fold is single-class
  };
  std::vector<Fold> folds;
  double mean_auc = 0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

/// Leave-one-recording-out: fit on all other recordings, score the held-out
/// one. Single-class held-out recordings are skipped and reported.
LoroResult loro_auc(const std::vector<RecordingFeatures>& recordings,
                    FeatureSet feature_set, double lambda = 1e-4);

/// Per-epoch label: 1 iff the unmasked scorers disagree at that epoch.
std::vector<int> consensus_disagreement_labels(const std::vector<Hypnogram>& scorers);

/// Per-epoch flag: 1 iff a stage change in the consensus hypnogram falls
/// within `window_s` of the epoch's interval.
std::vector<int> transition_proximity(const Hypnogram& consensus, double window_s = 60.0);

/// Column subset used by a feature set: entropy is column 0, distance
/// summaries are columns 1..3.
std::vector<std::size_t> feature_columns(FeatureSet set);

}  // namespace stagekit::disagreement

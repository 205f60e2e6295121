#include "stagekit/disagreement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "stagekit/ensemble.hpp"
#include "stagekit/metrics.hpp"

namespace stagekit::disagreement {

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v < 0.0) fail(ErrorCode::ShapeError, "negative probability");
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

std::vector<double> pairwise_cosine_distances(const std::vector<StageProbs>& members) {
  if (members.size() < 2) {
    fail(ErrorCode::TooFewMembers, "pairwise distances need at least two members");
  }
  std::vector<double> out;
  out.reserve(members.size() * (members.size() - 1) / 2);
  for (std::size_t m = 0; m < members.size(); ++m) {
    for (std::size_t n = m + 1; n < members.size(); ++n) {
      out.push_back(1.0 - metrics::cosine_similarity(members[m], members[n]));
    }
  }
  return out;
}

std::vector<EpochFeatures> epoch_features(const std::vector<const Hypnodensity*>& members) {
  if (members.size() < 2) {
    fail(ErrorCode::TooFewMembers, "epoch features need at least two members");
  }
  const Hypnodensity vote = ensemble::soft_vote(members);
  std::vector<EpochFeatures> out(vote.size());
  for (std::size_t t = 0; t < vote.size(); ++t) {
    std::vector<StageProbs> rows;
    rows.reserve(members.size());
    for (const Hypnodensity* m : members) rows.push_back(m->probs[t]);
    const std::vector<double> d = pairwise_cosine_distances(rows);

    EpochFeatures& f = out[t];
    f.entropy = shannon_entropy(vote.probs[t]);
    f.d_mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    double var = 0.0;
    for (double v : d) var += (v - f.d_mean) * (v - f.d_mean);
    f.d_std = std::sqrt(var / static_cast<double>(d.size()));
    f.d_max = *std::max_element(d.begin(), d.end());
  }
  return out;
}

std::vector<double> first_principal_component(
    const std::vector<std::array<double, 3>>& features) {
  if (features.size() < 2) {
    fail(ErrorCode::ShapeError, "principal component needs at least two rows");
  }
  const std::size_t n = features.size();
  Eigen::MatrixXd x(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) x(static_cast<Eigen::Index>(i), j) = features[i][j];
  }
  const Eigen::RowVector3d mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::Matrix3d cov = x.transpose() * x / static_cast<double>(n - 1);
  if (cov.norm() == 0.0) {
    fail(ErrorCode::DegenerateCovariance, "all feature rows are identical");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  Eigen::Vector3d axis = solver.eigenvectors().col(2);  // largest eigenvalue last
  if (axis(0) < 0.0 || (axis(0) == 0.0 && (axis(1) < 0.0 || (axis(1) == 0.0 && axis(2) < 0.0)))) {
    axis = -axis;
  }
  const Eigen::VectorXd scores = x * axis;
  return std::vector<double>(scores.data(), scores.data() + scores.size());
}

namespace {

double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

struct Standardized {
  Eigen::MatrixXd z;                       // n x kept
  std::vector<double> mean, stddev;        // per kept column, in kept order
  std::vector<std::size_t> kept;
};

Standardized standardize(const std::vector<std::vector<double>>& x) {
  const std::size_t n = x.size();
  const std::size_t f = x.empty() ? 0 : x[0].size();
  for (const auto& row : x) {
    if (row.size() != f) fail(ErrorCode::ShapeError, "ragged feature matrix");
  }
  Standardized s;
  for (std::size_t j = 0; j < f; ++j) {
    double mean = 0.0;
    for (const auto& row : x) mean += row[j];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& row : x) var += (row[j] - mean) * (row[j] - mean);
    const double stddev = std::sqrt(var / static_cast<double>(n));
    if (stddev <= 0.0) continue;  // constant feature, dropped
    s.kept.push_back(j);
    s.mean.push_back(mean);
    s.stddev.push_back(stddev);
  }
  s.z.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(s.kept.size()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < s.kept.size(); ++j) {
      s.z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (x[i][s.kept[j]] - s.mean[j]) / s.stddev[j];
    }
  }
  return s;
}

double objective(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& beta, double lambda) {
  // beta(0) is the intercept and is not regularized.
  const Eigen::VectorXd eta =
      (z * beta.tail(beta.size() - 1)).array() + beta(0);
  double nll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // log(1 + exp(eta)) - y*eta, computed stably
    const double e = eta(i);
    nll += (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e))) - y(i) * e;
  }
  return nll + 0.5 * lambda * beta.tail(beta.size() - 1).squaredNorm();
}

}  // namespace

double LogisticModel::predict(std::span<const double> features) const {
  double eta = intercept;
  for (std::size_t j = 0; j < kept_features.size(); ++j) {
    if (kept_features[j] >= features.size()) {
      fail(ErrorCode::ShapeError, "feature vector shorter than the model expects");
    }
    eta += weights[j] * (features[kept_features[j]] - feature_mean[j]) / feature_std[j];
  }
  return sigmoid(eta);
}

LogisticModel fit_logistic(const std::vector<std::vector<double>>& x,
                           const std::vector<int>& y, double lambda,
                           int max_iterations, double gradient_tolerance) {
  if (x.size() != y.size() || x.empty()) {
    fail(ErrorCode::ShapeError, "features and labels disagree on length");
  }
  const int positives = std::accumulate(y.begin(), y.end(), 0);
  if (positives == 0 || positives == static_cast<int>(y.size())) {
    fail(ErrorCode::DegenerateLabels, "labels contain a single class");
  }

  const Standardized s = standardize(x);
  const Eigen::Index n = s.z.rows();
  const Eigen::Index k = s.z.cols();
  Eigen::VectorXd labels(n);
  for (Eigen::Index i = 0; i < n; ++i) labels(i) = static_cast<double>(y[i]);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k + 1);
  double current = objective(s.z, labels, beta, lambda);
  for (int iter = 0; iter < max_iterations; ++iter) {
    const Eigen::VectorXd eta = (s.z * beta.tail(k)).array() + beta(0);
    Eigen::VectorXd p(n);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p(i) = sigmoid(eta(i));
      w(i) = std::max(p(i) * (1.0 - p(i)), 1e-12);
    }
    Eigen::VectorXd grad(k + 1);
    grad(0) = (p - labels).sum();
    grad.tail(k) = s.z.transpose() * (p - labels) + lambda * beta.tail(k);
    if (grad.norm() <= gradient_tolerance) break;

    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(k + 1, k + 1);
    hess(0, 0) = w.sum();
    hess.block(0, 1, 1, k) = (w.transpose() * s.z);
    hess.block(1, 0, k, 1) = hess.block(0, 1, 1, k).transpose();
    hess.block(1, 1, k, k) = s.z.transpose() * w.asDiagonal() * s.z +
                             lambda * Eigen::MatrixXd::Identity(k, k);

    Eigen::VectorXd step = hess.ldlt().solve(grad);
    double scale = 1.0;
    while (scale > 1e-10) {
      const Eigen::VectorXd candidate = beta - scale * step;
      const double value = objective(s.z, labels, candidate, lambda);
      if (value <= current) {
        beta = candidate;
        current = value;
        break;
      }
      scale *= 0.5;
    }
    if (scale <= 1e-10) break;  // no descent direction left
  }

  LogisticModel model;
  model.intercept = beta(0);
  model.weights.assign(beta.data() + 1, beta.data() + 1 + k);
  model.feature_mean = s.mean;
  model.feature_std = s.stddev;
  model.kept_features = s.kept;
  return model;
}

double logistic_objective(const std::vector<std::vector<double>>& x,
                          const std::vector<int>& y, std::span<const double> weights,
                          double intercept, double lambda) {
  const Standardized s = standardize(x);
  if (weights.size() != s.kept.size()) {
    fail(ErrorCode::ShapeError, "weight count does not match kept feature count");
  }
  Eigen::VectorXd beta(s.kept.size() + 1);
  beta(0) = intercept;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    beta(static_cast<Eigen::Index>(j) + 1) = weights[j];
  }
  Eigen::VectorXd labels(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) {
    labels(static_cast<Eigen::Index>(i)) = static_cast<double>(y[i]);
  }
  return objective(s.z, labels, beta, lambda);
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    fail(ErrorCode::ShapeError, "scores and labels disagree on length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::vector<double> rank(scores.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t idx = i; idx <= j; ++idx) rank[order[idx]] = midrank;
    i = j + 1;
  }

  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t idx = 0; idx < labels.size(); ++idx) {
    if (labels[idx] == 1) {
      rank_sum += rank[idx];
      ++n_pos;
    }
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    fail(ErrorCode::DegenerateLabels, "ROC-AUC needs both classes");
  }
  const double u = rank_sum - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<std::size_t> feature_columns(FeatureSet set) {
  switch (set) {
    case FeatureSet::Entropy: return {0};
    case FeatureSet::Distance: return {1, 2, 3};
    case FeatureSet::Both: return {0, 1, 2, 3};
  }
  return {};
}

LoroResult loro_auc(const std::vector<RecordingFeatures>& recordings,
                    FeatureSet feature_set, double lambda) {
  if (recordings.size() < 2) {
    fail(ErrorCode::ShapeError, "leave-one-recording-out needs at least two recordings");
  }
  const std::vector<std::size_t> columns = feature_columns(feature_set);
  auto project = [&](const std::vector<double>& row) {
    std::vector<double> out;
    out.reserve(columns.size());
    for (std::size_t c : columns) {
      if (c >= row.size()) fail(ErrorCode::ShapeError, "feature row too short");
      out.push_back(row[c]);
    }
    return out;
  };

  LoroResult result;
  double auc_sum = 0.0;
  for (std::size_t held = 0; held < recordings.size(); ++held) {
    const RecordingFeatures& fold = recordings[held];
    const int positives = std::accumulate(fold.y.begin(), fold.y.end(), 0);
    if (positives == 0 || positives == static_cast<int>(fold.y.size())) {
      result.folds.push_back({fold.recording_id, std::nullopt});
      ++result.skipped;
      continue;
    }
    std::vector<std::vector<double>> train_x;
    std::vector<int> train_y;
    for (std::size_t r = 0; r < recordings.size(); ++r) {
      if (r == held) continue;
      for (std::size_t i = 0; i < recordings[r].x.size(); ++i) {
        train_x.push_back(project(recordings[r].x[i]));
        train_y.push_back(recordings[r].y[i]);
      }
    }
    const LogisticModel model = fit_logistic(train_x, train_y, lambda);
    std::vector<double> scores;
    scores.reserve(fold.x.size());
    for (const auto& row : fold.x) {
      const std::vector<double> projected = project(row);
      scores.push_back(model.predict(projected));
    }
    const double auc = roc_auc(scores, fold.y);
    result.folds.push_back({fold.recording_id, auc});
    auc_sum += auc;
    ++result.evaluated;
  }
  if (result.evaluated == 0) {
    fail(ErrorCode::NoEvaluableFolds, "every held-out recording was single-class");
  }
  result.mean_auc = auc_sum / static_cast<double>(result.evaluated);
  return result;
}

std::vector<int> consensus_disagreement_labels(const std::vector<Hypnogram>& scorers) {
  if (scorers.size() < 2) {
    fail(ErrorCode::ShapeError, "disagreement labels need at least two scorers");
  }
  for (const Hypnogram& h : scorers) {
    if (h.size() != scorers[0].size()) {
      fail(ErrorCode::AlignmentError, "scorers disagree on epoch count");
    }
  }
  std::vector<int> labels(scorers[0].size(), 0);
  for (std::size_t t = 0; t < labels.size(); ++t) {
    Stage seen = Stage::Mask;
    for (const Hypnogram& h : scorers) {
      const Stage s = h.stages[t];
      if (!is_scored(s)) continue;
      if (seen == Stage::Mask) {
        seen = s;
      } else if (s != seen) {
        labels[t] = 1;
        break;
      }
    }
  }
  return labels;
}

std::vector<int> transition_proximity(const Hypnogram& consensus, double window_s) {
  validate(consensus);
  if (window_s < 0.0) fail(ErrorCode::ConfigError, "window must be nonnegative");
  const double d = consensus.epoch_duration_s;

  // Boundary times between time-adjacent scored epochs with differing stages.
  std::vector<double> boundaries;
  for (std::size_t t = 0; t + 1 < consensus.size(); ++t) {
    const Stage a = consensus.stages[t];
    const Stage b = consensus.stages[t + 1];
    if (is_scored(a) && is_scored(b) && a != b) {
      boundaries.push_back(static_cast<double>(t + 1) * d);
    }
  }

  std::vector<int> flags(consensus.size(), 0);
  for (std::size_t t = 0; t < consensus.size(); ++t) {
    const double lo = static_cast<double>(t) * d;
    const double hi = static_cast<double>(t + 1) * d;
    for (double x : boundaries) {
      const double dist = std::max({0.0, lo - x, x - hi});
      // A zero window still flags the epochs touching the boundary.
      if ((window_s == 0.0 && dist == 0.0) || (window_s > 0.0 && dist < window_s)) {
        flags[t] = 1;
        break;
      }
    }
  }
  return flags;
}

}  // namespace stagekit::disagreement

#include "stagekit/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace stagekit {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidStage: return "InvalidStage";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::NoScoredEpochs: return "NoScoredEpochs";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SequenceError: return "SequenceError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NormalizationError: return "NormalizationError";
    case ErrorCode::AlignmentError: return "AlignmentError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyBundle: return "EmptyBundle";
    case ErrorCode::SerializationError: return "SerializationError";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::UndefinedConsensus: return "UndefinedConsensus";
    case ErrorCode::EmptyConsensusSet: return "EmptyConsensusSet";
    case ErrorCode::DegenerateKappa: return "DegenerateKappa";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::TooFewMembers: return "TooFewMembers";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::NoEvaluableFolds: return "NoEvaluableFolds";
    case ErrorCode::TooFewPairs: return "TooFewPairs";
    case ErrorCode::NoSleep: return "NoSleep";
    case ErrorCode::MissingCovariate: return "MissingCovariate";
    case ErrorCode::InvalidInflation: return "InvalidInflation";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

Stage stage_from_code(int code) {
  if (code < 0 || code >= static_cast<int>(kNumStages)) return Stage::Mask;
  return static_cast<Stage>(code);
}

std::string_view stage_token(Stage s) {
  switch (s) {
    case Stage::Wake: return "W";
    case Stage::N1: return "N1";
    case Stage::N2: return "N2";
    case Stage::N3: return "N3";
    case Stage::Rem: return "REM";
    case Stage::Mask: return "MASK";
  }
  return "MASK";
}

std::optional<Stage> stage_from_token(std::string_view token) {
  std::string upper(token.size(), '\0');
  std::transform(token.begin(), token.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "W") return Stage::Wake;
  if (upper == "N1") return Stage::N1;
  if (upper == "N2") return Stage::N2;
  if (upper == "N3") return Stage::N3;
  if (upper == "REM") return Stage::Rem;
  if (upper == "MASK") return Stage::Mask;
  return std::nullopt;
}

StageProbs one_hot(Stage s) {
  if (!is_scored(s)) fail(ErrorCode::InvalidStage, "one_hot of MASK is undefined");
  StageProbs v{};
  v[static_cast<std::size_t>(s)] = 1.0;
  return v;
}

Stage argmax_stage(std::span<const double> p) {
  if (p.size() != kNumStages) {
    fail(ErrorCode::ShapeError,
         "expected 5 probabilities, got " + std::to_string(p.size()));
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumStages; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return static_cast<Stage>(best);
}

void normalize_row(StageProbs& row, double tolerance) {
  double sum = 0.0;
  for (double v : row) {
    if (v < 0.0) fail(ErrorCode::ParseError, "negative probability entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    fail(ErrorCode::NormalizationError,
         "row sum " + std::to_string(sum) + " outside tolerance");
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    for (double& v : row) v /= sum;
  }
}

void validate(const Hypnogram& h) {
  if (h.stages.empty()) fail(ErrorCode::EmptyInput, "hypnogram has no epochs");
  if (!(h.epoch_duration_s > 0.0)) {
    fail(ErrorCode::ShapeError, "epoch duration must be positive");
  }
}

void validate(const Hypnodensity& d, double tolerance) {
  if (d.probs.empty()) fail(ErrorCode::EmptyInput, "hypnodensity has no epochs");
  if (!(d.epoch_duration_s > 0.0)) {
    fail(ErrorCode::ShapeError, "epoch duration must be positive");
  }
  for (const StageProbs& row : d.probs) {
    double sum = 0.0;
    for (double v : row) {
      if (v < 0.0 || v > 1.0) fail(ErrorCode::ShapeError, "entry outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance) {
      fail(ErrorCode::NormalizationError, "row sum outside tolerance");
    }
  }
}

std::size_t RecordingBundle::epochs() const {
  if (!scorers.empty()) return scorers.begin()->second.size();
  if (!models.empty()) return models.begin()->second.size();
  return 0;
}

void validate(const RecordingBundle& bundle) {
  if (bundle.scorers.empty() && bundle.models.empty()) {
    fail(ErrorCode::EmptyBundle, "bundle '" + bundle.recording_id + "' is empty");
  }
  const std::size_t t = bundle.epochs();
  for (const auto& [name, h] : bundle.scorers) {
    validate(h);
    if (h.size() != t || h.epoch_duration_s != bundle.epoch_duration_s) {
      fail(ErrorCode::AlignmentError,
           "scorer '" + name + "' disagrees on length or epoch duration");
    }
  }
  for (const auto& [name, d] : bundle.models) {
    validate(d);
    if (d.size() != t || d.epoch_duration_s != bundle.epoch_duration_s) {
      fail(ErrorCode::AlignmentError,
           "model '" + name + "' disagrees on length or epoch duration");
    }
  }
}

std::vector<std::size_t> mask_alignment(const RecordingBundle& bundle) {
  validate(bundle);
  std::vector<std::size_t> kept;
  const std::size_t t = bundle.epochs();
  for (std::size_t i = 0; i < t; ++i) {
    bool masked = false;
    for (const auto& [name, h] : bundle.scorers) {
      if (!is_scored(h.stages[i])) {
        masked = true;
        break;
      }
    }
    if (!masked) kept.push_back(i);
  }
  if (kept.empty()) {
    fail(ErrorCode::NoScoredEpochs,
         "every epoch of '" + bundle.recording_id + "' is masked by some scorer");
  }
  return kept;
}

}  // namespace stagekit

#pragma once

#include <stdexcept>
#include <string>

namespace stagekit {

enum class ErrorCode {
  InvalidStage,
  ShapeError,
  NoScoredEpochs,
  ParseError,
  SequenceError,
  EmptyInput,
  NormalizationError,
  AlignmentError,
  IoError,
  EmptyBundle,
  SerializationError,
  EmptyEnsemble,
  UndefinedConsensus,
  EmptyConsensusSet,
  DegenerateKappa,
  ZeroVector,
  TooFewMembers,
  DegenerateCovariance,
  DegenerateLabels,
  NoEvaluableFolds,
  TooFewPairs,
  NoSleep,
  MissingCovariate,
  InvalidInflation,
  SchemaError,
  ConfigError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace stagekit

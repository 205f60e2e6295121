#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stagekit/error.hpp"

namespace stagekit {

inline constexpr std::size_t kNumStages = 5;

/// Five scoreable stages plus a masked/unscored sentinel. The integer codes
/// (W=0 .. REM=4) fix the column order of every matrix and file format.
enum class Stage : int {
  Wake = 0,
  N1 = 1,
  N2 = 2,
  N3 = 3,
  Rem = 4,
  Mask = -1,
};

using StageProbs = std::array<double, kNumStages>;

inline bool is_scored(Stage s) { return s != Stage::Mask; }

Stage stage_from_code(int code);
std::string_view stage_token(Stage s);
std::optional<Stage> stage_from_token(std::string_view token);

/// One-hot encoding of a scored stage. Mask is rejected.
StageProbs one_hot(Stage s);

/// Stage with maximal probability; ties broken by lowest stage code.
Stage argmax_stage(std::span<const double> p);

struct Hypnogram {
  std::vector<Stage> stages;
  double epoch_duration_s = 30.0;

  std::size_t size() const { return stages.size(); }
};

struct Hypnodensity {
  std::vector<StageProbs> probs;
  double epoch_duration_s = 30.0;

  std::size_t size() const { return probs.size(); }
};

/// Renormalizes a row to sum exactly 1. Rows whose sum deviates by more than
/// `tolerance` are rejected, as are negative entries. Rows already within a
/// few ulp of 1 are left untouched so that parse/serialize is a fixed point.
void normalize_row(StageProbs& row, double tolerance = 1e-6);

void validate(const Hypnogram& h);
void validate(const Hypnodensity& d, double tolerance = 1e-6);

/// Aligned scorer hypnograms and model hypnodensities for one recording.
struct RecordingBundle {
  std::string recording_id;
  double epoch_duration_s = 30.0;
  std::map<std::string, Hypnogram> scorers;
  std::map<std::string, Hypnodensity> models;

  std::size_t epochs() const;
};

void validate(const RecordingBundle& bundle);

/// Epoch indices where no scorer hypnogram holds Mask. All downstream
/// metrics restrict to this set.
std::vector<std::size_t> mask_alignment(const RecordingBundle& bundle);

}  // namespace stagekit

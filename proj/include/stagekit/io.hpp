#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stagekit/types.hpp"

namespace stagekit::io {

/// Parse a `epoch,stage` CSV. Epochs must increase from 0 without gaps;
/// stage tokens are case-insensitive.
Hypnogram parse_hypnogram_csv(std::string_view text, double epoch_duration_s = 30.0);

/// Headerless one-stage-per-line variant. Never auto-detected; callers opt in.
Hypnogram parse_hypnogram_lines(std::string_view text, double epoch_duration_s = 30.0);

/// Parse a `epoch,W,N1,N2,N3,REM` CSV. Rows must sum to 1 within 1e-6 and
/// are renormalized to exact sum 1.
Hypnodensity parse_hypnodensity_csv(std::string_view text, double epoch_duration_s = 30.0);

std::string serialize_hypnogram_csv(const Hypnogram& h);
std::string serialize_hypnodensity_csv(const Hypnodensity& d);

struct Manifest {
  std::string recording_id;
  double epoch_duration_s = 30.0;
  std::vector<std::pair<std::string, std::string>> scorers;  // (name, path)
  std::vector<std::pair<std::string, std::string>> models;   // (name, path)
};

Manifest parse_manifest_json(std::string_view text);
Manifest read_manifest(const std::string& path);

/// Load and validate every file referenced by the manifest. Relative paths
/// are resolved against the manifest's directory when one is known.
RecordingBundle load_bundle(const Manifest& manifest, const std::string& base_dir = "");

/// Deterministic report serialization: keys in insertion order, floats with
/// 6 significant digits, trailing newline. NaN anywhere is an error naming
/// the offending field.
std::string write_report_json(const nlohmann::ordered_json& report);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace stagekit::io

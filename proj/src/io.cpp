#include "stagekit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace stagekit::io {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  // A trailing newline does not introduce an empty record.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(',', start);
    if (end == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, end - start));
    start = end + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

long parse_long(std::string_view s, std::size_t line_no) {
  s = trim(s);
  long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    fail(ErrorCode::ParseError,
         "line " + std::to_string(line_no) + ": invalid integer '" + std::string(s) + "'");
  }
  return value;
}

double parse_double(std::string_view s, std::size_t line_no) {
  s = trim(s);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    fail(ErrorCode::ParseError,
         "line " + std::to_string(line_no) + ": invalid number '" + std::string(s) + "'");
  }
  return value;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(a[i])) !=
        std::toupper(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace

Hypnogram parse_hypnogram_csv(std::string_view text, double epoch_duration_s) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail(ErrorCode::EmptyInput, "empty hypnogram file");
  const auto header = split_fields(lines[0]);
  if (header.size() != 2 || !iequals(trim(header[0]), "epoch") ||
      !iequals(trim(header[1]), "stage")) {
    fail(ErrorCode::ParseError, "line 1: expected header 'epoch,stage'");
  }
  if (lines.size() == 1) fail(ErrorCode::EmptyInput, "hypnogram has a header but no rows");

  Hypnogram h;
  h.epoch_duration_s = epoch_duration_s;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 2) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 2 fields");
    }
    const long epoch = parse_long(fields[0], line_no);
    const long expected = static_cast<long>(i) - 1;
    if (epoch != expected) {
      fail(ErrorCode::SequenceError,
           "line " + std::to_string(line_no) + ": expected epoch " +
               std::to_string(expected) + ", got " + std::to_string(epoch));
    }
    const auto stage = stage_from_token(trim(fields[1]));
    if (!stage) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                      ": unknown stage token '" + std::string(trim(fields[1])) + "'");
    }
    h.stages.push_back(*stage);
  }
  return h;
}

Hypnogram parse_hypnogram_lines(std::string_view text, double epoch_duration_s) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail(ErrorCode::EmptyInput, "empty hypnogram file");
  Hypnogram h;
  h.epoch_duration_s = epoch_duration_s;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto stage = stage_from_token(trim(lines[i]));
    if (!stage) {
      fail(ErrorCode::ParseError, "line " + std::to_string(i + 1) +
                                      ": unknown stage token '" + std::string(trim(lines[i])) + "'");
    }
    h.stages.push_back(*stage);
  }
  return h;
}

Hypnodensity parse_hypnodensity_csv(std::string_view text, double epoch_duration_s) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail(ErrorCode::EmptyInput, "empty hypnodensity file");
  const auto header = split_fields(lines[0]);
  static constexpr std::string_view kHeader[6] = {"epoch", "W", "N1", "N2", "N3", "REM"};
  bool header_ok = header.size() == 6;
  for (std::size_t c = 0; header_ok && c < 6; ++c) {
    header_ok = iequals(trim(header[c]), kHeader[c]);
  }
  if (!header_ok) {
    fail(ErrorCode::ParseError, "line 1: expected header 'epoch,W,N1,N2,N3,REM'");
  }
  if (lines.size() == 1) fail(ErrorCode::EmptyInput, "hypnodensity has a header but no rows");

  Hypnodensity d;
  d.epoch_duration_s = epoch_duration_s;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 6) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 6 fields");
    }
    const long epoch = parse_long(fields[0], line_no);
    const long expected = static_cast<long>(i) - 1;
    if (epoch != expected) {
      fail(ErrorCode::SequenceError,
           "line " + std::to_string(line_no) + ": expected epoch " +
               std::to_string(expected) + ", got " + std::to_string(epoch));
    }
    StageProbs row{};
    for (std::size_t c = 0; c < kNumStages; ++c) {
      row[c] = parse_double(fields[c + 1], line_no);
      if (row[c] < 0.0) {
        fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": negative probability");
      }
    }
    try {
      normalize_row(row);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NormalizationError) {
        fail(ErrorCode::NormalizationError, "line " + std::to_string(line_no) + ": " + e.what());
      }
      throw;
    }
    d.probs.push_back(row);
  }
  return d;
}

std::string serialize_hypnogram_csv(const Hypnogram& h) {
  std::string out = "epoch,stage\n";
  for (std::size_t i = 0; i < h.stages.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += stage_token(h.stages[i]);
    out += '\n';
  }
  return out;
}

std::string serialize_hypnodensity_csv(const Hypnodensity& d) {
  std::string out = "epoch,W,N1,N2,N3,REM\n";
  for (std::size_t i = 0; i < d.probs.size(); ++i) {
    out += std::to_string(i);
    for (double v : d.probs[i]) {
      out += ',';
      append_double(out, v);
    }
    out += '\n';
  }
  return out;
}

Manifest parse_manifest_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("manifest is not valid JSON: ") + e.what());
  }
  Manifest m;
  if (!j.contains("recording_id") || !j["recording_id"].is_string()) {
    fail(ErrorCode::SchemaError, "manifest missing string field 'recording_id'");
  }
  m.recording_id = j["recording_id"].get<std::string>();
  m.epoch_duration_s = j.value("epoch_duration_s", 30.0);
  if (!(m.epoch_duration_s > 0.0)) {
    fail(ErrorCode::SchemaError, "epoch_duration_s must be positive");
  }
  auto read_entries = [&](const char* key,
                          std::vector<std::pair<std::string, std::string>>& out) {
    if (!j.contains(key)) return;
    for (const auto& entry : j.at(key)) {
      if (!entry.contains("name") || !entry.contains("path")) {
        fail(ErrorCode::SchemaError, std::string(key) + " entries need 'name' and 'path'");
      }
      std::string name = entry["name"].get<std::string>();
      std::string path = entry["path"].get<std::string>();
      if (name.empty() || path.empty()) {
        fail(ErrorCode::SchemaError, std::string(key) + " names and paths must be non-empty");
      }
      for (const auto& [n, p] : out) {
        if (n == name) fail(ErrorCode::SchemaError, "duplicate name '" + name + "' in " + key);
      }
      out.emplace_back(std::move(name), std::move(path));
    }
  };
  read_entries("scorers", m.scorers);
  read_entries("models", m.models);
  return m;
}

Manifest read_manifest(const std::string& path) {
  return parse_manifest_json(read_file(path));
}

RecordingBundle load_bundle(const Manifest& manifest, const std::string& base_dir) {
  if (manifest.scorers.empty() && manifest.models.empty()) {
    fail(ErrorCode::EmptyBundle, "manifest '" + manifest.recording_id + "' lists no files");
  }
  auto resolve = [&](const std::string& path) -> std::string {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (std::filesystem::path(base_dir) / p).string();
  };

  RecordingBundle bundle;
  bundle.recording_id = manifest.recording_id;
  bundle.epoch_duration_s = manifest.epoch_duration_s;

  std::string first_name;
  std::size_t first_t = 0;
  auto check_length = [&](const std::string& name, std::size_t t) {
    if (first_name.empty()) {
      first_name = name;
      first_t = t;
    } else if (t != first_t) {
      fail(ErrorCode::AlignmentError,
           "'" + name + "' has " + std::to_string(t) + " epochs but '" + first_name +
               "' has " + std::to_string(first_t));
    }
  };

  for (const auto& [name, path] : manifest.scorers) {
    Hypnogram h = parse_hypnogram_csv(read_file(resolve(path)), manifest.epoch_duration_s);
    check_length(name, h.size());
    bundle.scorers.emplace(name, std::move(h));
  }
  for (const auto& [name, path] : manifest.models) {
    Hypnodensity d = parse_hypnodensity_csv(read_file(resolve(path)), manifest.epoch_duration_s);
    check_length(name, d.size());
    bundle.models.emplace(name, std::move(d));
  }
  validate(bundle);
  return bundle;
}

namespace {

void dump_json(const nlohmann::ordered_json& node, std::string& out,
               const std::string& path) {
  switch (node.type()) {
    case nlohmann::json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, value] : node.items()) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(key).dump();
        out += ':';
        dump_json(value, out, path.empty() ? key : path + "." + key);
      }
      out += '}';
      break;
    }
    case nlohmann::json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < node.size(); ++i) {
        if (i) out += ',';
        dump_json(node[i], out, path + "[" + std::to_string(i) + "]");
      }
      out += ']';
      break;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = node.get<double>();
      if (!std::isfinite(v)) {
        fail(ErrorCode::SerializationError, path.empty() ? "<root>" : path);
      }
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.6g", v);
      out += buf;
      break;
    }
    default:
      out += node.dump();
      break;
  }
}

}  // namespace

std::string write_report_json(const nlohmann::ordered_json& report) {
  std::string out;
  dump_json(report, out, "");
  out += '\n';
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorCode::IoError, "short write to '" + path + "'");
}

}  // namespace stagekit::io

#include "stagekit/commands.hpp"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <thread>
#include <vector>

#include "stagekit/consensus.hpp"
#include "stagekit/disagreement.hpp"
#include "stagekit/ensemble.hpp"
#include "stagekit/gamlss.hpp"
#include "stagekit/io.hpp"
#include "stagekit/markers.hpp"
#include "stagekit/metrics.hpp"
#include "stagekit/stats.hpp"

namespace stagekit::commands {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string> manifest_paths(const json& config) {
  if (!config.contains("manifests") || !config["manifests"].is_array() ||
      config["manifests"].empty()) {
    fail(ErrorCode::ConfigError, "config needs a non-empty 'manifests' array");
  }
  return config["manifests"].get<std::vector<std::string>>();
}

RecordingBundle load_bundle_from(const std::string& manifest_path) {
  const io::Manifest manifest = io::read_manifest(manifest_path);
  const std::string base = std::filesystem::path(manifest_path).parent_path().string();
  try {
    return io::load_bundle(manifest, base);
  } catch (const Error& e) {
    throw Error(e.code(), "recording '" + manifest.recording_id + "': " + e.what());
  }
}

/// Deterministic parallel map over recording indices; results land by index.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : workers) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

unsigned jobs_from(const json& config) { return config.value("jobs", 0u); }

Hypnogram argmax_hypnogram(const Hypnodensity& density) {
  Hypnogram h;
  h.epoch_duration_s = density.epoch_duration_s;
  h.stages.reserve(density.size());
  for (const StageProbs& row : density.probs) h.stages.push_back(argmax_stage(row));
  return h;
}

std::vector<const Hypnodensity*> select_members(const RecordingBundle& bundle,
                                                const json& config) {
  std::vector<const Hypnodensity*> members;
  if (config.contains("members") && !config["members"].is_null()) {
    for (const auto& name_json : config["members"]) {
      const std::string name = name_json.get<std::string>();
      const auto it = bundle.models.find(name);
      if (it == bundle.models.end()) {
        fail(ErrorCode::ConfigError,
             "recording '" + bundle.recording_id + "' has no model '" + name + "'");
      }
      members.push_back(&it->second);
    }
  } else {
    for (const auto& [name, density] : bundle.models) members.push_back(&density);
  }
  if (members.empty()) {
    fail(ErrorCode::ConfigError, "recording '" + bundle.recording_id + "' has no models");
  }
  return members;
}

ordered_json metrics_json(const metrics::ConfusionMatrix& cm, metrics::AbsentPolicy absent) {
  ordered_json out;
  out["accuracy"] = metrics::accuracy(cm);
  out["macro_f1"] = metrics::macro_f1(cm, absent);
  try {
    out["kappa"] = metrics::cohens_kappa(cm);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateKappa) throw;
    out["kappa"] = nullptr;
  }
  ordered_json f1;
  for (std::size_t c = 0; c < kNumStages; ++c) {
    const Stage stage = static_cast<Stage>(c);
    const auto value = metrics::class_f1(cm, stage);
    f1[std::string(stage_token(stage))] = value ? ordered_json(*value) : ordered_json(nullptr);
  }
  out["class_f1"] = std::move(f1);
  out["epochs"] = cm.total;
  return out;
}

ordered_json marker_json(const markers::MarkerReport& r) {
  ordered_json out;
  out["tst_min"] = r.tst_min;
  out["waso_min"] = r.waso_min;
  out["n1_min"] = r.n1_min;
  out["n2_min"] = r.n2_min;
  out["n3_min"] = r.n3_min;
  out["rem_min"] = r.rem_min;
  out["reml_min"] = r.reml_min ? ordered_json(*r.reml_min) : ordered_json(nullptr);
  out["awh_per_hour"] = r.awh_per_hour;
  out["trh_per_hour"] = r.trh_per_hour;
  out["awakenings"] = r.awakenings;
  out["transitions"] = r.transitions;
  return out;
}

ordered_json bias_json(const markers::MarkerBias& b) {
  ordered_json out;
  out["tst_min"] = b.tst_min;
  out["waso_min"] = b.waso_min;
  out["n1_min"] = b.n1_min;
  out["n2_min"] = b.n2_min;
  out["n3_min"] = b.n3_min;
  out["rem_min"] = b.rem_min;
  out["reml_min"] = b.reml_min ? ordered_json(*b.reml_min) : ordered_json(nullptr);
  out["awh_per_hour"] = b.awh_per_hour;
  out["trh_per_hour"] = b.trh_per_hour;
  return out;
}

metrics::AbsentPolicy absent_policy(const json& config) {
  const std::string mode = config.value("absent", "exclude");
  if (mode == "exclude") return metrics::AbsentPolicy::Exclude;
  if (mode == "zero") return metrics::AbsentPolicy::Zero;
  fail(ErrorCode::ConfigError, "absent must be 'exclude' or 'zero'");
}

std::vector<Hypnogram> scorer_list(const RecordingBundle& bundle,
                                   std::vector<std::string>* names = nullptr) {
  std::vector<Hypnogram> scorers;
  for (const auto& [name, h] : bundle.scorers) {
    scorers.push_back(h);
    if (names) names->push_back(name);
  }
  return scorers;
}

ordered_json report_skeleton(const std::string& command) {
  ordered_json report;
  report["schema"] = 1;
  report["command"] = command;
  return report;
}

}  // namespace

ordered_json run_ensemble(const json& config) {
  const auto paths = manifest_paths(config);
  const std::string output_dir = config.value("output_dir", ".");
  std::filesystem::create_directories(output_dir);

  std::vector<ordered_json> entries(paths.size());
  parallel_for(paths.size(), jobs_from(config), [&](std::size_t i) {
    const RecordingBundle bundle = load_bundle_from(paths[i]);
    const auto members = select_members(bundle, config);
    const Hypnodensity vote = ensemble::soft_vote(members);
    const Hypnogram discrete = argmax_hypnogram(vote);

    const std::filesystem::path dir(output_dir);
    const std::string density_path = (dir / (bundle.recording_id + ".ensemble.hypnodensity.csv")).string();
    const std::string hypnogram_path = (dir / (bundle.recording_id + ".ensemble.hypnogram.csv")).string();
    io::write_file(density_path, io::serialize_hypnodensity_csv(vote));
    io::write_file(hypnogram_path, io::serialize_hypnogram_csv(discrete));

    ordered_json entry;
    entry["recording_id"] = bundle.recording_id;
    entry["members"] = static_cast<int>(members.size());
    entry["epochs"] = vote.size();
    entry["hypnodensity_csv"] = density_path;
    entry["hypnogram_csv"] = hypnogram_path;
    entries[i] = std::move(entry);
  });

  ordered_json report = report_skeleton("ensemble");
  report["recordings"] = entries;
  return report;
}

ordered_json run_evaluate(const json& config) {
  const auto paths = manifest_paths(config);
  const metrics::AbsentPolicy absent = absent_policy(config);
  const std::size_t top_k = config.value("k", 4u);

  const bool against_consensus =
      !config.contains("against") || config["against"].is_null() ||
      (config["against"].is_string() && config["against"] == "consensus");
  std::string against_scorer;
  if (!against_consensus) {
    if (config["against"].is_object() && config["against"].contains("scorer")) {
      against_scorer = config["against"]["scorer"].get<std::string>();
    } else if (config["against"].is_string()) {
      against_scorer = config["against"].get<std::string>();
    } else {
      fail(ErrorCode::ConfigError, "against must be 'consensus' or {\"scorer\": name}");
    }
  }

  std::vector<RecordingBundle> bundles(paths.size());
  parallel_for(paths.size(), jobs_from(config),
               [&](std::size_t i) { bundles[i] = load_bundle_from(paths[i]); });

  // Dataset-level scorer reliability drives top-k consensus membership.
  std::vector<std::string> consensus_names;
  if (against_consensus) {
    std::vector<std::map<std::string, Hypnogram>> all_scorers;
    for (const RecordingBundle& b : bundles) {
      if (b.scorers.size() < 2) {
        fail(ErrorCode::ConfigError, "recording '" + b.recording_id +
                                         "' has fewer than 2 scorers; consensus undefined");
      }
      all_scorers.push_back(b.scorers);
    }
    const auto reliability = consensus::dataset_soft_agreement(all_scorers);
    consensus_names = consensus::select_top_k(reliability, top_k);
    if (consensus_names.size() < 2) {
      fail(ErrorCode::ConfigError, "top-k consensus set has fewer than 2 scorers");
    }
  }

  struct Pooled {
    metrics::ConfusionMatrix cm;
    double similarity_sum = 0;
    std::size_t similarity_count = 0;
  };
  std::map<std::string, Pooled> pooled;
  std::vector<ordered_json> entries(bundles.size());

  parallel_for(bundles.size(), 1, [&](std::size_t i) {  // pooled sums: keep single-threaded
    const RecordingBundle& bundle = bundles[i];
    ordered_json entry;
    entry["recording_id"] = bundle.recording_id;
    entry["epochs"] = bundle.epochs();

    std::vector<std::string> names;
    const std::vector<Hypnogram> scorers = scorer_list(bundle, &names);

    if (scorers.size() >= 2) {
      ordered_json agreement;
      const auto values = consensus::soft_agreement_all(scorers);
      for (std::size_t s = 0; s < names.size(); ++s) agreement[names[s]] = values[s];
      entry["scorer_soft_agreement"] = std::move(agreement);
    }
    if (bundle.models.size() >= 2) {
      ordered_json agreement;
      for (const auto& [name, value] : consensus::inter_model_soft_agreement(bundle.models)) {
        agreement[name] = value;
      }
      entry["inter_model_soft_agreement"] = std::move(agreement);
    }

    // Reference hypnogram and soft reference distribution.
    Hypnogram reference;
    Hypnodensity soft_reference;
    std::vector<std::size_t> reference_epochs;
    if (against_consensus) {
      std::vector<Hypnogram> participating;
      std::vector<std::string> participating_names;
      for (const std::string& name : consensus_names) {
        const auto it = bundle.scorers.find(name);
        if (it == bundle.scorers.end()) continue;
        participating.push_back(it->second);
        participating_names.push_back(name);
      }
      if (participating.size() < 2) {
        fail(ErrorCode::ConfigError, "recording '" + bundle.recording_id +
                                         "' holds fewer than 2 of the top-k scorers");
      }
      const auto reliability = consensus::soft_agreement_all(participating);
      reference = consensus::consensus_hypnogram(participating, participating_names, reliability);
      auto [density, indices] = consensus::soft_consensus_density(participating);
      soft_reference = std::move(density);
      reference_epochs = std::move(indices);
      entry["consensus_scorers"] = participating_names;
    } else {
      const auto it = bundle.scorers.find(against_scorer);
      if (it == bundle.scorers.end()) {
        fail(ErrorCode::ConfigError, "recording '" + bundle.recording_id +
                                         "' has no scorer '" + against_scorer + "'");
      }
      reference = it->second;
      soft_reference.epoch_duration_s = reference.epoch_duration_s;
      for (std::size_t t = 0; t < reference.size(); ++t) {
        if (!is_scored(reference.stages[t])) continue;
        soft_reference.probs.push_back(one_hot(reference.stages[t]));
        reference_epochs.push_back(t);
      }
      if (reference_epochs.empty()) {
        fail(ErrorCode::NoScoredEpochs, "reference scorer is fully masked");
      }
    }

    ordered_json model_reports;
    for (const auto& [name, density] : bundle.models) {
      const Hypnogram prediction = argmax_hypnogram(density);
      const metrics::ConfusionMatrix cm = metrics::confusion(reference, prediction);
      ordered_json m = metrics_json(cm, absent);

      double similarity_sum = 0;
      for (std::size_t k = 0; k < reference_epochs.size(); ++k) {
        similarity_sum +=
            metrics::cosine_similarity(density.probs[reference_epochs[k]], soft_reference.probs[k]);
      }
      m["acs"] = similarity_sum / static_cast<double>(reference_epochs.size());

      Pooled& p = pooled[name];
      p.cm.add(cm);
      p.similarity_sum += similarity_sum;
      p.similarity_count += reference_epochs.size();
      model_reports[name] = std::move(m);
    }
    entry["models"] = std::move(model_reports);

    // Human scorers against their own exclude-one consensus, when derivable.
    if (against_consensus && scorers.size() >= 3) {
      ordered_json scorer_reports;
      for (std::size_t s = 0; s < scorers.size(); ++s) {
        const Hypnogram ref_s = consensus::consensus_exclude_one(scorers, names, s);
        const metrics::ConfusionMatrix cm = metrics::confusion(ref_s, scorers[s]);
        scorer_reports[names[s]] = metrics_json(cm, absent);
      }
      entry["scorers_vs_consensus"] = std::move(scorer_reports);
    }
    entries[i] = std::move(entry);
  });

  ordered_json pooled_json;
  for (const auto& [name, p] : pooled) {
    ordered_json m = metrics_json(p.cm, absent);
    m["acs"] = p.similarity_sum / static_cast<double>(p.similarity_count);
    pooled_json[name] = std::move(m);
  }

  ordered_json report = report_skeleton("evaluate");
  report["against"] = against_consensus ? ordered_json("consensus")
                                        : ordered_json{{"scorer", against_scorer}};
  if (against_consensus) report["consensus_pool"] = consensus_names;
  report["recordings"] = entries;
  report["pooled"] = std::move(pooled_json);
  return report;
}

ordered_json run_markers(const json& config) {
  const auto paths = manifest_paths(config);
  const std::string denom = config.value("rate_denominator", "tst");
  if (denom != "tst" && denom != "tib") {
    fail(ErrorCode::ConfigError, "rate_denominator must be 'tst' or 'tib'");
  }
  const markers::RateDenominator denominator =
      denom == "tst" ? markers::RateDenominator::Tst : markers::RateDenominator::Tib;
  const std::string reference_name = config.value("reference", "");

  std::vector<ordered_json> entries(paths.size());
  parallel_for(paths.size(), jobs_from(config), [&](std::size_t i) {
    const RecordingBundle bundle = load_bundle_from(paths[i]);
    ordered_json entry;
    entry["recording_id"] = bundle.recording_id;

    std::map<std::string, markers::MarkerReport> reports;
    ordered_json marker_block;
    ordered_json skipped = ordered_json::array();
    auto add = [&](const std::string& name, const Hypnogram& h) {
      try {
        const markers::MarkerReport r = markers::derive_markers(h, denominator);
        reports.emplace(name, r);
        marker_block[name] = marker_json(r);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoSleep) throw;
        skipped.push_back({{"name", name}, {"reason", "NoSleep"}});
      }
    };
    for (const auto& [name, h] : bundle.scorers) add(name, h);
    for (const auto& [name, d] : bundle.models) add(name, argmax_hypnogram(d));
    entry["markers"] = std::move(marker_block);
    if (!skipped.empty()) entry["skipped"] = std::move(skipped);

    if (!reference_name.empty()) {
      const auto ref = reports.find(reference_name);
      if (ref == reports.end()) {
        fail(ErrorCode::ConfigError, "recording '" + bundle.recording_id +
                                         "' has no usable reference '" + reference_name + "'");
      }
      ordered_json bias_block;
      for (const auto& [name, report] : reports) {
        if (name == reference_name) continue;
        bias_block[name] = bias_json(markers::marker_bias(report, ref->second));
      }
      entry["bias"] = std::move(bias_block);
    }
    entries[i] = std::move(entry);
  });

  ordered_json report = report_skeleton("markers");
  report["rate_denominator"] = denom;
  report["recordings"] = entries;
  return report;
}

ordered_json run_disagree(const json& config) {
  const auto paths = manifest_paths(config);
  const std::string set_name = config.value("feature_set", "both");
  disagreement::FeatureSet feature_set;
  if (set_name == "entropy") {
    feature_set = disagreement::FeatureSet::Entropy;
  } else if (set_name == "distance") {
    feature_set = disagreement::FeatureSet::Distance;
  } else if (set_name == "both") {
    feature_set = disagreement::FeatureSet::Both;
  } else {
    fail(ErrorCode::ConfigError, "feature_set must be entropy, distance, or both");
  }
  const double lambda = config.value("lambda", 1e-4);
  const double window_s = config.value("window_s", 60.0);
  const std::string dump_dir = config.value("dump_features", "");
  if (!dump_dir.empty()) std::filesystem::create_directories(dump_dir);

  std::vector<disagreement::RecordingFeatures> recordings(paths.size());
  parallel_for(paths.size(), jobs_from(config), [&](std::size_t i) {
    const RecordingBundle bundle = load_bundle_from(paths[i]);
    if (bundle.models.size() < 2) {
      fail(ErrorCode::TooFewMembers,
           "recording '" + bundle.recording_id + "' needs at least 2 models");
    }
    std::vector<std::string> names;
    const std::vector<Hypnogram> scorers = scorer_list(bundle, &names);
    if (scorers.size() < 2) {
      fail(ErrorCode::ConfigError,
           "recording '" + bundle.recording_id + "' needs at least 2 scorers for labels");
    }

    std::vector<const Hypnodensity*> members;
    for (const auto& [name, density] : bundle.models) members.push_back(&density);
    const auto features = disagreement::epoch_features(members);
    const auto labels = disagreement::consensus_disagreement_labels(scorers);
    const Hypnogram consensus_h = consensus::consensus_hypnogram(
        scorers, names, consensus::soft_agreement_all(scorers));
    const auto near = disagreement::transition_proximity(consensus_h, window_s);
    const auto epochs = mask_alignment(bundle);

    disagreement::RecordingFeatures rec;
    rec.recording_id = bundle.recording_id;
    for (std::size_t t : epochs) {
      rec.x.push_back({features[t].entropy, features[t].d_mean, features[t].d_std,
                       features[t].d_max});
      rec.y.push_back(labels[t]);
    }
    recordings[i] = std::move(rec);

    if (!dump_dir.empty()) {
      std::string csv = "epoch,entropy,d_mean,d_std,d_max,label,near_transition\n";
      for (std::size_t t : epochs) {
        csv += std::to_string(t) + "," + std::to_string(features[t].entropy) + "," +
               std::to_string(features[t].d_mean) + "," + std::to_string(features[t].d_std) +
               "," + std::to_string(features[t].d_max) + "," + std::to_string(labels[t]) +
               "," + std::to_string(near[t]) + "\n";
      }
      io::write_file((std::filesystem::path(dump_dir) /
                      (bundle.recording_id + ".features.csv"))
                         .string(),
                     csv);
    }
  });

  const disagreement::LoroResult result = disagreement::loro_auc(recordings, feature_set, lambda);

  ordered_json folds = ordered_json::array();
  for (const auto& fold : result.folds) {
    ordered_json f;
    f["recording_id"] = fold.recording_id;
    if (fold.auc) {
      f["auc"] = *fold.auc;
    } else {
      f["skipped"] = "single-class recording";
    }
    folds.push_back(std::move(f));
  }

  ordered_json report = report_skeleton("disagree");
  report["feature_set"] = set_name;
  report["lambda"] = lambda;
  report["window_s"] = window_s;
  report["recordings"] = std::move(folds);
  report["mean_auc"] = result.mean_auc;
  report["evaluated"] = result.evaluated;
  report["skipped"] = result.skipped;
  return report;
}

ordered_json run_stats(const json& config) {
  if (!config.contains("input")) fail(ErrorCode::ConfigError, "stats needs an 'input' CSV path");
  const std::string input = config["input"].get<std::string>();
  const std::string baseline = config.value("baseline", "");
  if (baseline.empty()) fail(ErrorCode::ConfigError, "stats needs a 'baseline' column name");
  const std::string measure = config.value("measure", "value");
  if (measure != "value" && measure != "consistency") {
    fail(ErrorCode::ConfigError, "measure must be 'value' or 'consistency'");
  }

  // CSV layout: header `recording,<column>...`, one row per recording.
  const std::string text = io::read_file(input);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  if (lines.size() < 2) fail(ErrorCode::EmptyInput, "metric CSV has no data rows");

  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) {
        out.push_back(line.substr(pos));
        break;
      }
      out.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    return out;
  };

  const auto header = split(lines[0]);
  if (header.size() < 2 || header[0] != "recording") {
    fail(ErrorCode::ParseError, "expected header 'recording,<column>...'");
  }
  std::vector<std::string> columns(header.begin() + 1, header.end());
  std::map<std::string, std::vector<double>> values;
  for (const std::string& c : columns) values[c] = {};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i]);
    if (fields.size() != header.size()) {
      fail(ErrorCode::ParseError, "line " + std::to_string(i + 1) + ": wrong field count");
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
      values[columns[c]].push_back(std::stod(fields[c + 1]));
    }
  }
  if (!values.count(baseline)) {
    fail(ErrorCode::ConfigError, "baseline column '" + baseline + "' not found");
  }

  auto series = [&](const std::string& name) {
    if (measure == "value") return values[name];
    return stats::consistency_deviation(values[name]);
  };
  const std::vector<double> base = series(baseline);

  struct Row {
    std::string name;
    std::optional<stats::TestResult> test;
    std::string skip_reason;
  };
  std::vector<Row> rows;
  std::vector<double> p_raws;
  for (const std::string& column : columns) {
    if (column == baseline) continue;
    Row row;
    row.name = column;
    try {
      // value: candidate better means larger; consistency: smaller deviation
      // from the median is better, so the sides flip.
      row.test = measure == "value" ? stats::wilcoxon_one_sided(series(column), base)
                                    : stats::wilcoxon_one_sided(base, series(column));
      p_raws.push_back(row.test->p_raw);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TooFewPairs) throw;
      row.skip_reason = e.what();
    }
    rows.push_back(std::move(row));
  }
  const std::vector<double> adjusted = stats::holm_adjust(p_raws);
  std::size_t adj_index = 0;

  ordered_json comparisons = ordered_json::array();
  for (Row& row : rows) {
    ordered_json c;
    c["column"] = row.name;
    c["baseline"] = baseline;
    if (row.test) {
      row.test->p_adjusted = adjusted[adj_index++];
      c["w"] = row.test->w_statistic;
      c["z"] = row.test->z;
      c["p_raw"] = row.test->p_raw;
      c["p_adjusted"] = row.test->p_adjusted;
      c["effect_r"] = row.test->effect_r;
      c["n_effective"] = row.test->n_effective;
      c["exact"] = row.test->exact;
    } else {
      c["skipped"] = row.skip_reason;
    }
    comparisons.push_back(std::move(c));
  }

  ordered_json report = report_skeleton("stats");
  report["measure"] = measure;
  report["comparisons"] = std::move(comparisons);
  return report;
}

ordered_json run_gamlss_predict(const json& config) {
  if (!config.contains("table") || !config.contains("outcome")) {
    fail(ErrorCode::ConfigError, "gamlss-predict needs 'table' and 'outcome'");
  }
  const auto specs = gamlss::load_gamlss_table(io::read_file(config["table"].get<std::string>()));
  const std::string outcome = config["outcome"].get<std::string>();
  const auto it = specs.find(outcome);
  if (it == specs.end()) {
    fail(ErrorCode::ConfigError, "table has no outcome '" + outcome + "'");
  }

  gamlss::CovariateProfile profile;
  if (config.contains("gender")) {
    const auto& g = config["gender"];
    if (g.is_string()) {
      const std::string s = g.get<std::string>();
      if (s == "male") {
        profile.gender_male = 1;
      } else if (s == "female") {
        profile.gender_male = 0;
      } else {
        fail(ErrorCode::ConfigError, "gender must be 'male' or 'female'");
      }
    } else {
      profile.gender_male = g.get<double>();
    }
  }
  profile.ahi_div10 = config.value("ahi", 0.0) / 10.0;
  profile.plmi_div10 = config.value("plmi", 0.0) / 10.0;
  if (config.contains("age_offset_mu")) {
    profile.age_spline["mu"] = config["age_offset_mu"].get<double>();
  }
  if (config.contains("age_offset_sigma")) {
    profile.age_spline["sigma"] = config["age_offset_sigma"].get<double>();
  }

  const gamlss::GamlssSpec& spec = it->second;
  ordered_json report = report_skeleton("gamlss-predict");
  report["outcome"] = outcome;
  report["family"] = spec.family == gamlss::Family::Beinf ? "BEINF" : "NORMAL";
  ordered_json etas;
  for (const auto& [name, param] : spec.params) {
    etas[name] = gamlss::linear_predictor(param, profile, name);
  }
  report["linear_predictors"] = std::move(etas);
  ordered_json parameters;
  for (const auto& [name, value] : gamlss::parameter_values(spec, profile)) {
    parameters[name] = value;
  }
  report["parameters"] = std::move(parameters);
  report["expected_value"] = gamlss::expected_value(spec, profile);
  return report;
}

ordered_json run_command(const std::string& command, const json& config) {
  if (command == "ensemble") return run_ensemble(config);
  if (command == "evaluate") return run_evaluate(config);
  if (command == "markers") return run_markers(config);
  if (command == "disagree") return run_disagree(config);
  if (command == "stats") return run_stats(config);
  if (command == "gamlss-predict") return run_gamlss_predict(config);
  fail(ErrorCode::ConfigError, "unknown command '" + command + "'");
}

}  // namespace stagekit::commands

#include "stagekit.h"

#include <cstring>
#include <exception>
#include <map>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "stagekit/commands.hpp"
#include "stagekit/consensus.hpp"
#include "stagekit/disagreement.hpp"
#include "stagekit/ensemble.hpp"
#include "stagekit/error.hpp"
#include "stagekit/gamlss.hpp"
#include "stagekit/io.hpp"
#include "stagekit/metrics.hpp"
#include "stagekit/stats.hpp"
#include "stagekit/types.hpp"

namespace {

thread_local std::string g_last_error;

sk_status status_of(stagekit::ErrorCode code) {
  using stagekit::ErrorCode;
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::SequenceError:
    case ErrorCode::SchemaError:
      return SK_ERR_PARSE;
    case ErrorCode::IoError:
      return SK_ERR_IO;
    case ErrorCode::InvalidStage:
    case ErrorCode::ShapeError:
    case ErrorCode::EmptyInput:
    case ErrorCode::ConfigError:
    case ErrorCode::MissingCovariate:
      return SK_ERR_ARGUMENT;
    default:
      return SK_ERR_DOMAIN;
  }
}

template <typename Fn>
sk_status guarded(Fn&& fn) {
  try {
    fn();
    return SK_OK;
  } catch (const stagekit::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SK_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SK_ERR_INTERNAL;
  }
}

sk_status require(bool ok, const char* message) {
  if (ok) return SK_OK;
  g_last_error = message;
  return SK_ERR_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

struct sk_gamlss_table {
  std::map<std::string, stagekit::gamlss::GamlssSpec> outcomes;
};

const char* sk_last_error(void) { return g_last_error.c_str(); }

void sk_string_free(char* s) { delete[] s; }

sk_status sk_soft_vote(const double* members, int m_count, int t_count, double* out) {
  if (auto st = require(members && out && m_count > 0 && t_count > 0,
                        "sk_soft_vote: null pointer or non-positive dimension"))
    return st;
  return guarded([&] {
    std::vector<stagekit::Hypnodensity> ms(static_cast<std::size_t>(m_count));
    for (int m = 0; m < m_count; ++m) {
      ms[m].probs.resize(static_cast<std::size_t>(t_count));
      for (int t = 0; t < t_count; ++t)
        for (int k = 0; k < 5; ++k)
          ms[m].probs[t][k] = members[(static_cast<std::size_t>(m) * t_count + t) * 5 + k];
    }
    stagekit::Hypnodensity voted = stagekit::ensemble::soft_vote(ms);
    for (int t = 0; t < t_count; ++t)
      for (int k = 0; k < 5; ++k) out[static_cast<std::size_t>(t) * 5 + k] = voted.probs[t][k];
  });
}

sk_status sk_argmax_stage(const double* row, int* out_stage) {
  if (auto st = require(row && out_stage, "sk_argmax_stage: null pointer")) return st;
  return guarded([&] {
    *out_stage = static_cast<int>(stagekit::argmax_stage(std::span<const double>(row, 5)));
  });
}

sk_status sk_shannon_entropy(const double* p, int n, double* out) {
  if (auto st = require(p && out && n > 0, "sk_shannon_entropy: null pointer or n <= 0"))
    return st;
  return guarded([&] {
    *out = stagekit::disagreement::shannon_entropy(std::span<const double>(p, n));
  });
}

sk_status sk_cosine_similarity(const double* a, const double* b, int n, double* out) {
  if (auto st = require(a && b && out && n > 0, "sk_cosine_similarity: null pointer or n <= 0"))
    return st;
  return guarded([&] {
    *out = stagekit::metrics::cosine_similarity(std::span<const double>(a, n),
                                                std::span<const double>(b, n));
  });
}

sk_status sk_soft_agreement(const int* stages, int s_count, int t_count, double* out) {
  if (auto st = require(stages && out && s_count > 1 && t_count > 0,
                        "sk_soft_agreement: need at least 2 scorers and 1 epoch"))
    return st;
  return guarded([&] {
    std::vector<stagekit::Hypnogram> scorers(static_cast<std::size_t>(s_count));
    for (int s = 0; s < s_count; ++s) {
      scorers[s].stages.resize(static_cast<std::size_t>(t_count));
      for (int t = 0; t < t_count; ++t) {
        int code = stages[static_cast<std::size_t>(s) * t_count + t];
        scorers[s].stages[t] =
            code < 0 ? stagekit::Stage::Mask : stagekit::stage_from_code(code);
      }
    }
    std::vector<double> agreement = stagekit::consensus::soft_agreement_all(scorers);
    for (int s = 0; s < s_count; ++s) out[s] = agreement[s];
  });
}

sk_status sk_wilcoxon_one_sided(const double* a, const double* b, int n, double* w, double* z,
                                double* p, double* effect_r, int* n_effective) {
  if (auto st = require(a && b && n > 0, "sk_wilcoxon_one_sided: null pointer or n <= 0"))
    return st;
  return guarded([&] {
    stagekit::stats::TestResult r = stagekit::stats::wilcoxon_one_sided(
        std::vector<double>(a, a + n), std::vector<double>(b, b + n));
    if (w) *w = r.w_statistic;
    if (z) *z = r.z;
    if (p) *p = r.p_raw;
    if (effect_r) *effect_r = r.effect_r;
    if (n_effective) *n_effective = static_cast<int>(r.n_effective);
  });
}

sk_status sk_holm_adjust(const double* p, int m, double* out) {
  if (auto st = require(p && out && m > 0, "sk_holm_adjust: null pointer or m <= 0")) return st;
  return guarded([&] {
    std::vector<double> adjusted = stagekit::stats::holm_adjust(std::vector<double>(p, p + m));
    for (int i = 0; i < m; ++i) out[i] = adjusted[i];
  });
}

sk_status sk_roc_auc(const double* scores, const int* labels, int n, double* out) {
  if (auto st = require(scores && labels && out && n > 0,
                        "sk_roc_auc: null pointer or n <= 0"))
    return st;
  return guarded([&] {
    *out = stagekit::disagreement::roc_auc(std::vector<double>(scores, scores + n),
                                           std::vector<int>(labels, labels + n));
  });
}

sk_status sk_gamlss_table_load_file(const char* path, sk_gamlss_table** out) {
  if (auto st = require(path && out, "sk_gamlss_table_load_file: null pointer")) return st;
  return guarded([&] {
    auto table = std::make_unique<sk_gamlss_table>();
    table->outcomes = stagekit::gamlss::load_gamlss_table(stagekit::io::read_file(path));
    *out = table.release();
  });
}

sk_status sk_gamlss_table_load_text(const char* text, sk_gamlss_table** out) {
  if (auto st = require(text && out, "sk_gamlss_table_load_text: null pointer")) return st;
  return guarded([&] {
    auto table = std::make_unique<sk_gamlss_table>();
    table->outcomes = stagekit::gamlss::load_gamlss_table(text);
    *out = table.release();
  });
}

void sk_gamlss_table_free(sk_gamlss_table* table) { delete table; }

sk_status sk_gamlss_expected_value(const sk_gamlss_table* table, const char* outcome,
                                   int gender_male, double ahi, double plmi,
                                   double age_offset_mu, double age_offset_sigma, double* out) {
  if (auto st = require(table && outcome && out, "sk_gamlss_expected_value: null pointer"))
    return st;
  return guarded([&] {
    auto it = table->outcomes.find(outcome);
    if (it == table->outcomes.end())
      stagekit::fail(stagekit::ErrorCode::ConfigError,
                     std::string("unknown outcome: ") + outcome);
    stagekit::gamlss::CovariateProfile profile;
    profile.gender_male = gender_male != 0;
    profile.ahi_div10 = ahi / 10.0;
    profile.plmi_div10 = plmi / 10.0;
    profile.age_spline["mu"] = age_offset_mu;
    profile.age_spline["sigma"] = age_offset_sigma;
    *out = stagekit::gamlss::expected_value(it->second, profile);
  });
}

sk_status sk_run_command(const char* command, const char* config_json, char** report_json) {
  if (auto st = require(command && config_json && report_json, "sk_run_command: null pointer"))
    return st;
  return guarded([&] {
    nlohmann::json config;
    try {
      config = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::parse_error& e) {
      stagekit::fail(stagekit::ErrorCode::ParseError,
                     std::string("invalid config JSON: ") + e.what());
    }
    nlohmann::ordered_json report = stagekit::commands::run_command(command, config);
    *report_json = dup_string(stagekit::io::write_report_json(report));
  });
}

}  // extern "C"

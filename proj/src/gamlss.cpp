#include "stagekit/gamlss.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

namespace stagekit::gamlss {

namespace {

std::string lower(std::string_view s) {
  std::string out(s.size(), '\0');
  std::transform(s.begin(), s.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double covariate_value(const CovariateProfile& profile, const std::string& name) {
  const std::string key = lower(name);
  if (key == "gender") return profile.gender_male;
  if (key == "ahi") return profile.ahi_div10;
  if (key == "plmi") return profile.plmi_div10;
  fail(ErrorCode::MissingCovariate, name);
}

Link link_for(Family family, const std::string& param) {
  if (family == Family::Beinf) {
    if (param == "mu" || param == "sigma") return Link::Logit;
    return Link::Log;  // nu, tau
  }
  return param == "mu" ? Link::Identity : Link::Log;
}

}  // namespace

double linear_predictor(const ParamSpec& param, const CovariateProfile& profile,
                        const std::string& param_name) {
  double eta = param.intercept + param.spline_offset;
  for (const auto& [name, coefficient] : param.coefficients) {
    eta += coefficient * covariate_value(profile, name);
  }
  const auto spline = profile.age_spline.find(param_name);
  if (spline != profile.age_spline.end()) eta += spline->second;
  return eta;
}

double inverse_link(Link link, double eta) {
  switch (link) {
    case Link::Logit: return 1.0 / (1.0 + std::exp(-eta));
    case Link::Log: return std::exp(eta);
    case Link::Identity: return eta;
  }
  return eta;
}

std::map<std::string, double> parameter_values(const GamlssSpec& spec,
                                               const CovariateProfile& profile) {
  std::map<std::string, double> out;
  for (const auto& [name, param] : spec.params) {
    out[name] = inverse_link(param.link, linear_predictor(param, profile, name));
  }
  return out;
}

double expected_value(const GamlssSpec& spec, const CovariateProfile& profile) {
  const auto values = parameter_values(spec, profile);
  const double mu = values.at("mu");
  if (spec.family == Family::Normal) return mu;
  const double nu = values.at("nu");
  const double tau = values.at("tau");
  if (nu + tau >= 1.0) {
    fail(ErrorCode::InvalidInflation, "inflation masses nu + tau reach 1");
  }
  return tau + (1.0 - nu - tau) * mu;
}

std::map<std::string, GamlssSpec> load_gamlss_table(std::string_view text) {
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
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) fail(ErrorCode::EmptyInput, "empty coefficient table");

  auto fields_of = [](std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string_view::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    return fields;
  };

  const auto header = fields_of(lines[0]);
  if (header.size() < 4 || lower(trim(header[0])) != "outcome" ||
      lower(trim(header[1])) != "parameter" || lower(trim(header[2])) != "term" ||
      lower(trim(header[3])) != "estimate") {
    fail(ErrorCode::SchemaError, "row 1: expected header 'outcome,parameter,term,estimate'");
  }

  struct RawParam {
    std::map<std::string, double> terms;  // includes "intercept"
    bool seen = false;
  };
  std::map<std::string, std::map<std::string, RawParam>> raw;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::size_t row_no = i + 1;
    const auto fields = fields_of(lines[i]);
    if (fields.size() < 4) {
      fail(ErrorCode::SchemaError, "row " + std::to_string(row_no) + ": expected 4 fields");
    }
    const std::string outcome(trim(fields[0]));
    const std::string parameter = lower(trim(fields[1]));
    const std::string term = lower(trim(fields[2]));
    const std::string_view estimate = trim(fields[3]);

    if (parameter != "mu" && parameter != "sigma" && parameter != "nu" && parameter != "tau") {
      fail(ErrorCode::SchemaError,
           "row " + std::to_string(row_no) + ": unknown parameter '" + parameter + "'");
    }
    if (term != "intercept" && term != "gender" && term != "ahi" && term != "plmi") {
      fail(ErrorCode::SchemaError,
           "row " + std::to_string(row_no) + ": unknown term '" + term + "'");
    }
    RawParam& slot = raw[outcome][parameter];
    slot.seen = true;
    if (estimate.empty()) continue;  // blank cell: term excluded from this model

    double value = 0.0;
    auto [ptr, ec] = std::from_chars(estimate.data(), estimate.data() + estimate.size(), value);
    if (ec != std::errc{} || ptr != estimate.data() + estimate.size()) {
      fail(ErrorCode::SchemaError,
           "row " + std::to_string(row_no) + ": invalid estimate '" + std::string(estimate) + "'");
    }
    slot.terms[term] = value;
  }

  std::map<std::string, GamlssSpec> specs;
  for (const auto& [outcome, params] : raw) {
    GamlssSpec spec;
    spec.family = (params.count("nu") || params.count("tau")) ? Family::Beinf : Family::Normal;
    const std::vector<std::string> required =
        spec.family == Family::Beinf ? std::vector<std::string>{"mu", "sigma", "nu", "tau"}
                                     : std::vector<std::string>{"mu", "sigma"};
    for (const std::string& name : required) {
      const auto it = params.find(name);
      if (it == params.end() || !it->second.seen) {
        fail(ErrorCode::SchemaError, "outcome '" + outcome + "' lacks parameter '" + name + "'");
      }
      ParamSpec p;
      p.link = link_for(spec.family, name);
      for (const auto& [term, value] : it->second.terms) {
        if (term == "intercept") {
          p.intercept = value;
        } else {
          p.coefficients[term] = value;
        }
      }
      spec.params[name] = std::move(p);
    }
    specs[outcome] = std::move(spec);
  }
  return specs;
}

}  // namespace stagekit::gamlss

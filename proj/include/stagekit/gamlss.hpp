#pragma once

#include <map>
#include <string>
#include <string_view>

#include "stagekit/error.hpp"

namespace stagekit::gamlss {

enum class Family { Beinf, Normal };
enum class Link { Logit, Log, Identity };

struct ParamSpec {
  Link link = Link::Identity;
  double intercept = 0;
  std::map<std::string, double> coefficients;  // covariate name -> estimate
  double spline_offset = 0;
};

/// Fitted coefficient set for one outcome. BEINF carries mu/sigma/nu/tau,
/// NORMAL carries mu/sigma; links are fixed per family.
struct GamlssSpec {
  Family family = Family::Normal;
  std::map<std::string, ParamSpec> params;  // keyed "mu","sigma","nu","tau"
};

struct CovariateProfile {
  double gender_male = 0;  // female is the reference level
  double ahi_div10 = 0;    // apnea-hypopnea index / 10
  double plmi_div10 = 0;   // periodic limb movement index / 10
  // Precomputed additive age-spline contribution per distributional parameter.
  std::map<std::string, double> age_spline;
};

double linear_predictor(const ParamSpec& param, const CovariateProfile& profile,
                        const std::string& param_name);

double inverse_link(Link link, double eta);

/// Every distributional parameter on its natural scale.
std::map<std::string, double> parameter_values(const GamlssSpec& spec,
                                               const CovariateProfile& profile);

/// BEINF: tau + (1 - nu - tau) * mu. NORMAL: mu.
double expected_value(const GamlssSpec& spec, const CovariateProfile& profile);

/// Parse a coefficient table CSV with columns outcome,parameter,term,estimate.
/// A blank estimate means the term was excluded from that parameter's model.
/// Outcomes with nu or tau rows are BEINF, the rest NORMAL.
std::map<std::string, GamlssSpec> load_gamlss_table(std::string_view text);

}  // namespace stagekit::gamlss

// stagekit command-line interface. Builds a JSON configuration from the
// parsed arguments and drives the shared library through the C API only.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stagekit.h"

namespace {

using nlohmann::json;

struct CommonArgs {
  std::vector<std::string> manifests;
  std::string output;
  unsigned jobs = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_manifests) {
  if (with_manifests) {
    cmd->add_option("manifests", args.manifests, "Recording manifest JSON files")
        ->required()
        ->check(CLI::ExistingFile);
  }
  cmd->add_option("-o,--output", args.output, "Write the JSON report here (default: stdout)");
  cmd->add_option("-j,--jobs", args.jobs, "Worker threads (0 = hardware default)");
}

int emit(const std::string& report, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << report;
    return 0;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << output << "\n";
    return 4;
  }
  out << report;
  return 0;
}

int run(const std::string& command, const json& config, const std::string& output) {
  char* report = nullptr;
  sk_status status = sk_run_command(command.c_str(), config.dump().c_str(), &report);
  if (status != SK_OK) {
    std::cerr << "error: " << sk_last_error() << "\n";
    return static_cast<int>(status);
  }
  int rc = emit(report, output);
  sk_string_free(report);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stagekit: sleep-stage ensemble evaluation toolkit"};
  app.require_subcommand(1);

  // ensemble
  CommonArgs ens_args;
  std::vector<std::string> ens_members;
  std::string ens_output_dir = ".";
  auto* ens = app.add_subcommand("ensemble", "Soft-vote member hypnodensities and write the results");
  add_common(ens, ens_args, true);
  ens->add_option("-m,--members", ens_members, "Model names to combine (default: all)");
  ens->add_option("--output-dir", ens_output_dir, "Directory for the ensemble CSV files");

  // evaluate
  CommonArgs eval_args;
  std::vector<std::string> eval_members;
  std::string eval_against = "consensus";
  unsigned eval_k = 4;
  std::string eval_absent = "exclude";
  auto* eval = app.add_subcommand("evaluate", "Score models against consensus or a named scorer");
  add_common(eval, eval_args, true);
  eval->add_option("-m,--members", eval_members, "Model names to evaluate (default: all)");
  eval->add_option("--against", eval_against, "'consensus' or a scorer name");
  eval->add_option("-k,--top-k", eval_k, "Consensus pool size by dataset reliability");
  eval->add_option("--absent", eval_absent, "Macro-F1 policy for absent classes")
      ->check(CLI::IsMember({"exclude", "zero"}));

  // markers
  CommonArgs mark_args;
  std::string mark_denominator = "tst";
  std::string mark_reference;
  auto* mark = app.add_subcommand("markers", "Derive clinical sleep markers per scorer and model");
  add_common(mark, mark_args, true);
  mark->add_option("--rate-denominator", mark_denominator, "Hourly-rate denominator")
      ->check(CLI::IsMember({"tst", "tib"}));
  mark->add_option("--reference", mark_reference, "Scorer used for marker bias");

  // disagree
  CommonArgs dis_args;
  std::string dis_feature_set = "both";
  double dis_lambda = 1e-4;
  double dis_window = 60.0;
  std::string dis_dump;
  auto* dis = app.add_subcommand("disagree", "Model-disagreement features and error prediction");
  add_common(dis, dis_args, true);
  dis->add_option("--feature-set", dis_feature_set, "Predictors for the logistic model")
      ->check(CLI::IsMember({"entropy", "distance", "both"}));
  dis->add_option("--lambda", dis_lambda, "L2 regularization strength");
  dis->add_option("--window", dis_window, "Transition-proximity window in seconds");
  dis->add_option("--dump-features", dis_dump, "Directory for per-recording feature CSV files");

  // stats
  CommonArgs stats_args;
  std::string stats_input;
  std::string stats_baseline;
  std::string stats_measure = "value";
  auto* stats = app.add_subcommand("stats", "Paired one-sided Wilcoxon tests with Holm correction");
  add_common(stats, stats_args, false);
  stats->add_option("-i,--input", stats_input, "CSV of per-recording values (recording,<name>,...)")
      ->required()
      ->check(CLI::ExistingFile);
  stats->add_option("--baseline", stats_baseline, "Column every other column is tested against");
  stats->add_option("--measure", stats_measure, "Compare raw values or deviation from the median")
      ->check(CLI::IsMember({"value", "consistency"}));

  // gamlss-predict
  CommonArgs gam_args;
  std::string gam_table;
  std::string gam_outcome;
  std::string gam_gender = "female";
  double gam_ahi = 0.0;
  double gam_plmi = 0.0;
  double gam_age_mu = 0.0;
  double gam_age_sigma = 0.0;
  bool gam_has_age_mu = false;
  bool gam_has_age_sigma = false;
  auto* gam = app.add_subcommand("gamlss-predict", "Expected outcome value from a coefficient table");
  add_common(gam, gam_args, false);
  gam->add_option("-t,--table", gam_table, "Coefficient CSV (outcome,parameter,term,estimate)")
      ->required()
      ->check(CLI::ExistingFile);
  gam->add_option("--outcome", gam_outcome, "Outcome name from the table")->required();
  gam->add_option("--gender", gam_gender, "male or female")
      ->check(CLI::IsMember({"male", "female"}));
  gam->add_option("--ahi", gam_ahi, "Apnea-hypopnea index, events per hour");
  gam->add_option("--plmi", gam_plmi, "Periodic limb movement index, events per hour");
  gam->add_option("--age-offset-mu", gam_age_mu, "Additive age-spline term on the mu predictor")
      ->each([&](const std::string&) { gam_has_age_mu = true; });
  gam->add_option("--age-offset-sigma", gam_age_sigma,
                  "Additive age-spline term on the sigma predictor")
      ->each([&](const std::string&) { gam_has_age_sigma = true; });

  CLI11_PARSE(app, argc, argv);

  json config = json::object();
  std::string command;
  std::string output;

  if (ens->parsed()) {
    command = "ensemble";
    output = ens_args.output;
    config["manifests"] = ens_args.manifests;
    config["jobs"] = ens_args.jobs;
    config["output_dir"] = ens_output_dir;
    if (!ens_members.empty()) config["members"] = ens_members;
  } else if (eval->parsed()) {
    command = "evaluate";
    output = eval_args.output;
    config["manifests"] = eval_args.manifests;
    config["jobs"] = eval_args.jobs;
    config["against"] = eval_against;
    config["k"] = eval_k;
    config["absent"] = eval_absent;
    if (!eval_members.empty()) config["members"] = eval_members;
  } else if (mark->parsed()) {
    command = "markers";
    output = mark_args.output;
    config["manifests"] = mark_args.manifests;
    config["jobs"] = mark_args.jobs;
    config["rate_denominator"] = mark_denominator;
    if (!mark_reference.empty()) config["reference"] = mark_reference;
  } else if (dis->parsed()) {
    command = "disagree";
    output = dis_args.output;
    config["manifests"] = dis_args.manifests;
    config["jobs"] = dis_args.jobs;
    config["feature_set"] = dis_feature_set;
    config["lambda"] = dis_lambda;
    config["window_s"] = dis_window;
    if (!dis_dump.empty()) config["dump_features"] = dis_dump;
  } else if (stats->parsed()) {
    command = "stats";
    output = stats_args.output;
    config["input"] = stats_input;
    config["measure"] = stats_measure;
    if (!stats_baseline.empty()) config["baseline"] = stats_baseline;
  } else if (gam->parsed()) {
    command = "gamlss-predict";
    output = gam_args.output;
    config["table"] = gam_table;
    config["outcome"] = gam_outcome;
    config["gender"] = gam_gender;
    config["ahi"] = gam_ahi;
    config["plmi"] = gam_plmi;
    if (gam_has_age_mu) config["age_offset_mu"] = gam_age_mu;
    if (gam_has_age_sigma) config["age_offset_sigma"] = gam_age_sigma;
  }

  return run(command, config, output);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "stagekit/commands.hpp"
#include "stagekit/error.hpp"
#include "stagekit/io.hpp"

using namespace stagekit;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Corpus {
  fs::path dir;
  std::vector<std::string> manifests;

  Corpus() {
    dir = fs::temp_directory_path() /
          ("stagekit-cmd-" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~Corpus() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }

  std::string file(const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    return (dir / name).string();
  }

  static std::string hypnogram_csv(const std::vector<int>& codes) {
    std::ostringstream out;
    out << "epoch,stage\n";
    for (std::size_t t = 0; t < codes.size(); ++t) {
      out << t << ','
          << (codes[t] < 0 ? "MASK" : std::string(stage_token(stage_from_code(codes[t]))))
          << '\n';
    }
    return out.str();
  }

  static std::string density_csv(const std::vector<std::array<double, 5>>& rows) {
    std::ostringstream out;
    out << "epoch,W,N1,N2,N3,REM\n";
    out.setf(std::ios::fixed);
    out.precision(6);
    for (std::size_t t = 0; t < rows.size(); ++t) {
      out << t;
      // Round the first four entries to the printed grid and emit the last
      // as the residual, so the serialized row sums to 1 exactly.
      double running = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double snapped = std::round(rows[t][k] * 1e6) / 1e6;
        running += snapped;
        out << ',' << snapped;
      }
      out << ',' << (1.0 - running) << '\n';
    }
    return out.str();
  }

  // A recording with three scorers and two models. The models track scorer
  // consensus loosely; staging follows a plausible W->N1->N2->N3->REM arc.
  void add_recording(const std::string& id, unsigned seed, int epochs = 60) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<int> truth(epochs);
    int stage = 0;
    for (int t = 0; t < epochs; ++t) {
      if (u(rng) < 0.25) stage = (stage + 1) % 5;
      truth[t] = stage;
    }
    auto scorer = [&](double fidelity) {
      std::vector<int> s(truth);
      for (int& c : s)
        if (u(rng) > fidelity) c = static_cast<int>(u(rng) * 5);
      return s;
    };
    std::vector<int> s1 = scorer(0.95), s2 = scorer(0.9), s3 = scorer(0.7);
    auto model = [&](double sharpness) {
      std::vector<std::array<double, 5>> rows(epochs);
      for (int t = 0; t < epochs; ++t) {
        double total = 0;
        for (int k = 0; k < 5; ++k)
          total += (rows[t][k] = (k == truth[t] ? sharpness : 1.0) + 0.2 * u(rng));
        for (double& v : rows[t]) v /= total;
      }
      return rows;
    };
    file(id + ".s1.csv", hypnogram_csv(s1));
    file(id + ".s2.csv", hypnogram_csv(s2));
    file(id + ".s3.csv", hypnogram_csv(s3));
    file(id + ".m1.csv", density_csv(model(6.0)));
    file(id + ".m2.csv", density_csv(model(3.0)));
    manifests.push_back(file(id + ".json", R"({
      "recording_id": ")" + id + R"(",
      "epoch_duration_s": 30,
      "scorers": [
        {"name": "s1", "path": ")" + id + R"(.s1.csv"},
        {"name": "s2", "path": ")" + id + R"(.s2.csv"},
        {"name": "s3", "path": ")" + id + R"(.s3.csv"}
      ],
      "models": [
        {"name": "m1", "path": ")" + id + R"(.m1.csv"},
        {"name": "m2", "path": ")" + id + R"(.m2.csv"}
      ]
    })"));
  }
};

}  // namespace

TEST_CASE("ensemble command writes averaged hypnodensity and argmax hypnogram") {
  Corpus corpus;
  corpus.add_recording("recA", 1);
  json config = {{"manifests", corpus.manifests},
                 {"output_dir", corpus.dir.string()}};
  auto report = commands::run_command("ensemble", config);
  CHECK(report["command"] == "ensemble");
  REQUIRE(report["recordings"].size() == 1);
  CHECK(report["recordings"][0]["members"] == 2);

  auto density = io::parse_hypnodensity_csv(
      io::read_file((corpus.dir / "recA.ensemble.hypnodensity.csv").string()));
  auto hypnogram = io::parse_hypnogram_csv(
      io::read_file((corpus.dir / "recA.ensemble.hypnogram.csv").string()));
  CHECK(density.size() == 60);
  CHECK(hypnogram.size() == 60);
  for (std::size_t t = 0; t < density.size(); ++t)
    CHECK(hypnogram.stages[t] == argmax_stage(density.probs[t]));
}

TEST_CASE("ensemble command validates member names") {
  Corpus corpus;
  corpus.add_recording("recA", 2);
  json config = {{"manifests", corpus.manifests},
                 {"output_dir", corpus.dir.string()},
                 {"members", json::array({"m1", "nope"})}};
  try {
    (void)commands::run_command("ensemble", config);
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }
}

TEST_CASE("evaluate command produces per-model metrics against consensus") {
  Corpus corpus;
  corpus.add_recording("recA", 3);
  corpus.add_recording("recB", 4);
  json config = {{"manifests", corpus.manifests}, {"k", 3}};
  auto report = commands::run_command("evaluate", config);
  CHECK(report["command"] == "evaluate");
  CHECK(report["against"] == "consensus");
  REQUIRE(report["recordings"].size() == 2);
  for (const auto& rec : report["recordings"]) {
    CHECK(rec["scorer_soft_agreement"].size() == 3);
    for (const auto& [name, m] : rec["models"].items()) {
      CHECK(m["accuracy"].get<double>() >= 0.0);
      CHECK(m["accuracy"].get<double>() <= 1.0);
      CHECK(m["macro_f1"].get<double>() >= 0.0);
      CHECK(m["acs"].get<double>() <= 1.0 + 1e-12);
      (void)name;
    }
  }
  CHECK(report["pooled"].contains("m1"));
  // The sharper model should dominate the fuzzier one in pooled accuracy.
  double acc1 = report["pooled"]["m1"]["accuracy"].get<double>();
  double acc2 = report["pooled"]["m2"]["accuracy"].get<double>();
  CHECK(acc1 >= acc2);
}

TEST_CASE("evaluate command can target a named scorer") {
  Corpus corpus;
  corpus.add_recording("recA", 5);
  json config = {{"manifests", corpus.manifests}, {"against", "s1"}};
  auto report = commands::run_command("evaluate", config);
  CHECK(report["against"]["scorer"] == "s1");
  CHECK(report["recordings"][0]["models"].contains("m1"));

  json bad = {{"manifests", corpus.manifests}, {"against", "s9"}};
  CHECK_THROWS_AS((void)commands::run_command("evaluate", bad), Error);
}

TEST_CASE("markers command reports the worked 10-epoch values") {
  Corpus corpus;
  std::string csv = Corpus::hypnogram_csv({0, 0, 1, 2, 2, 3, 4, 0, 2, 0});
  corpus.file("tiny.s1.csv", csv);
  corpus.manifests.push_back(corpus.file("tiny.json", R"({
    "recording_id": "tiny",
    "scorers": [{"name": "s1", "path": "tiny.s1.csv"}],
    "models": []
  })"));
  json config = {{"manifests", corpus.manifests}};
  auto report = commands::run_command("markers", config);
  const auto& m = report["recordings"][0]["markers"]["s1"];
  CHECK(m["tst_min"].get<double>() == doctest::Approx(3.0));
  CHECK(m["waso_min"].get<double>() == doctest::Approx(0.5));
  CHECK(m["reml_min"].get<double>() == doctest::Approx(2.0));
  CHECK(m["awakenings"] == 2);
  CHECK(m["transitions"] == 7);
  CHECK(m["awh_per_hour"].get<double>() == doctest::Approx(40.0));
  CHECK(m["trh_per_hour"].get<double>() == doctest::Approx(140.0));
}

TEST_CASE("markers command skips all-wake scorers with a structured entry") {
  Corpus corpus;
  corpus.file("awake.s1.csv", Corpus::hypnogram_csv({0, 0, 0, 0}));
  corpus.file("awake.s2.csv", Corpus::hypnogram_csv({0, 2, 2, 0}));
  corpus.manifests.push_back(corpus.file("awake.json", R"({
    "recording_id": "awake",
    "scorers": [{"name": "s1", "path": "awake.s1.csv"},
                 {"name": "s2", "path": "awake.s2.csv"}],
    "models": []
  })"));
  json config = {{"manifests", corpus.manifests}};
  auto report = commands::run_command("markers", config);
  const auto& rec = report["recordings"][0];
  CHECK(rec["markers"]["s2"]["tst_min"].get<double>() == doctest::Approx(1.0));
  CHECK(rec["skipped"].size() == 1);
  CHECK(rec["skipped"][0]["name"] == "s1");
}

TEST_CASE("markers command computes bias against a reference scorer") {
  Corpus corpus;
  corpus.file("r.s1.csv", Corpus::hypnogram_csv({0, 2, 2, 2, 2, 0}));
  corpus.file("r.s2.csv", Corpus::hypnogram_csv({0, 2, 2, 0, 2, 0}));
  corpus.manifests.push_back(corpus.file("r.json", R"({
    "recording_id": "r",
    "scorers": [{"name": "s1", "path": "r.s1.csv"},
                 {"name": "s2", "path": "r.s2.csv"}],
    "models": []
  })"));
  json config = {{"manifests", corpus.manifests}, {"reference", "s1"}};
  auto report = commands::run_command("markers", config);
  const auto& bias = report["recordings"][0]["bias"]["s2"];
  CHECK(bias["tst_min"].get<double>() == doctest::Approx(-0.5));
}

TEST_CASE("disagree command runs the feature and LORO pipeline") {
  Corpus corpus;
  for (int r = 0; r < 4; ++r)
    corpus.add_recording("rec" + std::to_string(r), 100 + r, 80);
  json config = {{"manifests", corpus.manifests}, {"feature_set", "both"}};
  auto report = commands::run_command("disagree", config);
  CHECK(report["command"] == "disagree");
  CHECK(report["feature_set"] == "both");
  REQUIRE(report["recordings"].size() == 4);
  double mean_auc = report["mean_auc"].get<double>();
  CHECK(mean_auc >= 0.0);
  CHECK(mean_auc <= 1.0);
  CHECK(report["evaluated"].get<int>() + report["skipped"].get<int>() == 4);
  for (const auto& fold : report["recordings"])
    CHECK((fold.contains("auc") || fold.contains("skipped")));
}

TEST_CASE("disagree command dumps per-epoch feature CSVs on request") {
  Corpus corpus;
  corpus.add_recording("recA", 42, 50);
  corpus.add_recording("recB", 43, 50);
  fs::path dump = corpus.dir / "features";
  json config = {{"manifests", corpus.manifests},
                 {"dump_features", dump.string()}};
  (void)commands::run_command("disagree", config);
  std::string text = io::read_file((dump / "recA.features.csv").string());
  CHECK(text.rfind("epoch,entropy,d_mean,d_std,d_max,label,near_transition", 0) == 0);
}

TEST_CASE("stats command tests columns against a baseline with Holm correction") {
  Corpus corpus;
  std::ostringstream csv;
  csv << "recording,ens,m1,m2\n";
  std::mt19937 rng(7);
  std::normal_distribution<double> g(0.0, 0.02);
  for (int i = 0; i < 12; ++i) {
    double base = 0.75 + g(rng);
    csv << "rec" << i << ',' << base + 0.05 + g(rng) << ',' << base << ','
        << base - 0.04 + g(rng) << '\n';
  }
  std::string input = corpus.file("metrics.csv", csv.str());
  json config = {{"input", input}, {"baseline", "ens"}};
  auto report = commands::run_command("stats", config);
  REQUIRE(report["comparisons"].size() == 2);
  for (const auto& t : report["comparisons"]) {
    CHECK(t["baseline"] == "ens");
    CHECK(t["p_adjusted"].get<double>() >= t["p_raw"].get<double>() - 1e-15);
    CHECK(t["n_effective"].get<int>() == 12);
  }
}

TEST_CASE("stats consistency measure compares deviation from the median") {
  Corpus corpus;
  std::ostringstream csv;
  csv << "recording,a,b\n";
  std::mt19937 rng(8);
  std::normal_distribution<double> tight(0.8, 0.01), loose(0.8, 0.2);
  for (int i = 0; i < 10; ++i)
    csv << "rec" << i << ',' << tight(rng) << ',' << loose(rng) << '\n';
  std::string input = corpus.file("metrics.csv", csv.str());
  json config = {{"input", input}, {"baseline", "a"}, {"measure", "consistency"}};
  auto report = commands::run_command("stats", config);
  CHECK(report["measure"] == "consistency");
  REQUIRE(report["comparisons"].size() == 1);
}

TEST_CASE("gamlss-predict command reproduces the covariate worked case") {
  Corpus corpus;
  std::string table = corpus.file("table.csv",
                                  "outcome,parameter,term,estimate\n"
                                  "MF1,mu,intercept,1.12\n"
                                  "MF1,mu,gender,-0.06\n"
                                  "MF1,mu,ahi,-0.05\n"
                                  "MF1,mu,plmi,-0.02\n"
                                  "MF1,sigma,intercept,-1.51\n"
                                  "MF1,nu,intercept,-22.54\n"
                                  "MF1,tau,intercept,-22.63\n"
                                  "TST,mu,intercept,-9.05\n"
                                  "TST,mu,gender,-1.37\n"
                                  "TST,mu,ahi,-1.95\n"
                                  "TST,mu,plmi,-0.47\n"
                                  "TST,sigma,intercept,2.86\n");
  json config = {{"table", table}, {"outcome", "MF1"}, {"gender", "male"},
                 {"ahi", 30.0},    {"plmi", 10.0}};
  auto report = commands::run_command("gamlss-predict", config);
  CHECK(report["expected_value"].get<double>() == doctest::Approx(0.709).epsilon(1e-3));

  config["outcome"] = "TST";
  auto tst = commands::run_command("gamlss-predict", config);
  CHECK(tst["expected_value"].get<double>() == doctest::Approx(-16.74));
}

TEST_CASE("unknown subcommands are rejected") {
  CHECK_THROWS_AS((void)commands::run_command("nope", json::object()), Error);
}

TEST_CASE("reports serialize without NaN and with the schema marker") {
  Corpus corpus;
  corpus.add_recording("recA", 12);
  json config = {{"manifests", corpus.manifests}};
  auto report = commands::run_command("evaluate", config);
  std::string text = io::write_report_json(report);
  CHECK(text.find("\"schema\":1") != std::string::npos);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "stagekit/types.hpp"

using namespace stagekit;

TEST_CASE("stage codes round-trip") {
  for (int code = 0; code < 5; ++code) {
    CHECK(static_cast<int>(stage_from_code(code)) == code);
  }
  // Any code outside 0..4 is the mask sentinel.
  CHECK(stage_from_code(-1) == Stage::Mask);
  CHECK(stage_from_code(5) == Stage::Mask);
  CHECK(stage_from_code(-2) == Stage::Mask);
}

TEST_CASE("stage tokens are case-insensitive") {
  CHECK(stage_from_token("W") == Stage::Wake);
  CHECK(stage_from_token("w") == Stage::Wake);
  CHECK(stage_from_token("n1") == Stage::N1);
  CHECK(stage_from_token("N2") == Stage::N2);
  CHECK(stage_from_token("n3") == Stage::N3);
  CHECK(stage_from_token("rem") == Stage::Rem);
  CHECK(stage_from_token("REM") == Stage::Rem);
  CHECK(stage_from_token("MASK") == Stage::Mask);
  CHECK(stage_from_token("mask") == Stage::Mask);
  CHECK_FALSE(stage_from_token("N4").has_value());
  CHECK_FALSE(stage_from_token("").has_value());
  for (Stage s : {Stage::Wake, Stage::N1, Stage::N2, Stage::N3, Stage::Rem, Stage::Mask}) {
    auto back = stage_from_token(stage_token(s));
    REQUIRE(back.has_value());
    CHECK(*back == s);
  }
}

TEST_CASE("one_hot puts unit mass on the stage") {
  StageProbs p = one_hot(Stage::N3);
  CHECK(p[3] == 1.0);
  CHECK(p[0] + p[1] + p[2] + p[4] == 0.0);
  CHECK_THROWS_AS(one_hot(Stage::Mask), Error);
}

TEST_CASE("argmax_stage breaks ties by lowest code") {
  StageProbs uniform{0.2, 0.2, 0.2, 0.2, 0.2};
  CHECK(argmax_stage(uniform) == Stage::Wake);
  StageProbs pair{0.1, 0.35, 0.35, 0.1, 0.1};
  CHECK(argmax_stage(pair) == Stage::N1);
  StageProbs clear{0.0, 0.0, 0.1, 0.0, 0.9};
  CHECK(argmax_stage(clear) == Stage::Rem);
  double four[4] = {1, 0, 0, 0};
  CHECK_THROWS_AS(argmax_stage(std::span<const double>(four, 4)), Error);
}

TEST_CASE("normalize_row accepts near-1 sums and rejects far ones") {
  StageProbs ok{0.2, 0.2, 0.2, 0.2, 0.2};
  normalize_row(ok);
  CHECK(ok[0] == 0.2);  // already exact: untouched

  StageProbs near{0.2 + 5e-8, 0.2, 0.2, 0.2, 0.2};
  normalize_row(near);
  double sum = near[0] + near[1] + near[2] + near[3] + near[4];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  StageProbs bad{0.5, 0.5, 0.5, 0, 0};
  CHECK_THROWS_AS(normalize_row(bad), Error);
  StageProbs negative{1.2, -0.2, 0, 0, 0};
  CHECK_THROWS_AS(normalize_row(negative), Error);
}

TEST_CASE("normalize_row leaves rows within 1e-12 of 1 bit-identical") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    StageProbs row;
    double sum = 0;
    for (double& v : row) sum += (v = u(rng));
    for (double& v : row) v /= sum;
    StageProbs before = row;
    normalize_row(row);
    StageProbs again = row;
    normalize_row(again);
    CHECK(again == row);  // idempotent
    double total = row[0] + row[1] + row[2] + row[3] + row[4];
    CHECK(std::abs(total - 1.0) <= 1e-12);
    (void)before;
  }
}

TEST_CASE("validate rejects empty structures") {
  CHECK_THROWS_AS(validate(Hypnogram{}), Error);
  CHECK_THROWS_AS(validate(Hypnodensity{}), Error);
  Hypnogram h;
  h.stages = {Stage::Wake};
  h.epoch_duration_s = 0;
  CHECK_THROWS_AS(validate(h), Error);
}

TEST_CASE("RecordingBundle validation enforces equal lengths") {
  RecordingBundle b;
  b.recording_id = "r1";
  b.scorers["a"].stages = {Stage::Wake, Stage::N2};
  b.scorers["b"].stages = {Stage::N1, Stage::N2};
  b.models["m"].probs = {one_hot(Stage::Wake), one_hot(Stage::N2)};
  validate(b);
  CHECK(b.epochs() == 2);

  b.scorers["c"].stages = {Stage::Wake};
  CHECK_THROWS_AS(validate(b), Error);
}

TEST_CASE("mask_alignment keeps epochs no scorer masks") {
  RecordingBundle b;
  b.recording_id = "r1";
  b.scorers["a"].stages = {Stage::Wake, Stage::Mask, Stage::N2, Stage::N3};
  b.scorers["b"].stages = {Stage::Wake, Stage::N1, Stage::Mask, Stage::N3};
  auto kept = mask_alignment(b);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0] == 0);
  CHECK(kept[1] == 3);
}

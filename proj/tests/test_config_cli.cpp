// tests/test_config_cli.cpp
//
// Copyright 2026  The SATForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "satforge/config/experiment_config.hpp"

namespace fs = std::filesystem;
using namespace satforge;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SATFORGE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string tiny_config_text() {
  return "[corpus]\n"
         "seed = 5\n"
         "num_speakers = 6\n"
         "utts_per_speaker = 16\n"
         "feat_dim = 6\n"
         "num_classes = 4\n"
         "frames_min = 20\n"
         "frames_max = 60\n"
         "session_utts_min = 2\n"
         "session_utts_max = 3\n"
         "train_frac = 0.6\n"
         "[training]\n"
         "epochs_stage1 = 2\n"
         "epochs_stage2 = 1\n"
         "batch_size = 128\n"
         "[conditioning]\n"
         "mechanism = ctrl-layer\n"
         "[embeddings]\n"
         "jitter_speaker = 0\n";
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& sub = "") const {
    return sub.empty() ? path.string() : (path / sub).string();
  }
};

}  // namespace

TEST_CASE("config: parse/serialize round-trip is the identity") {
  config::ExperimentConfig cfg = config::ExperimentConfig::parse(tiny_config_text());
  CHECK(cfg.corpus.num_speakers == 6);
  CHECK(cfg.training.params.epochs_stage1 == 2);
  CHECK(cfg.conditioning.mechanism == "ctrl-layer");
  const std::string text = cfg.serialize();
  config::ExperimentConfig again = config::ExperimentConfig::parse(text);
  CHECK(cfg == again);
  CHECK(again.serialize() == text);
  CHECK(cfg.fingerprint() == again.fingerprint());
}

TEST_CASE("config: defaults fill everything the file omits") {
  config::ExperimentConfig cfg = config::ExperimentConfig::parse("");
  CHECK(cfg.corpus.feat_dim == 20);
  CHECK(cfg.model.hidden_units == 64);
  CHECK(cfg.training.params.momentum == doctest::Approx(0.9f));
  CHECK(cfg.training.params.lr == doctest::Approx(0.1f));
  CHECK(cfg.training.params.lr_stage2 == doctest::Approx(0.02f));
  CHECK(cfg.conditioning.mechanism == "none");
  CHECK(cfg.conditioning.constant_scale == doctest::Approx(0.1f));
  CHECK(cfg.evaluation.non_target_prop == doctest::Approx(0.5));
}

TEST_CASE("config: unknown keys and sections are rejected") {
  CHECK_THROWS_AS(config::ExperimentConfig::parse("[corpus]\nbogus_key = 3\n"), DataError);
  CHECK_THROWS_AS(config::ExperimentConfig::parse("[bogus]\nseed = 3\n"), DataError);
  CHECK_THROWS_AS(config::ExperimentConfig::parse("[corpus]\nseed = 1\nseed = 2\n"), DataError);
  CHECK_THROWS_AS(config::ExperimentConfig::parse("seed = 1\n"), DataError);
}

TEST_CASE("config: enum-like fields are validated") {
  CHECK_THROWS_AS(config::ExperimentConfig::parse("[conditioning]\nmechanism = bogus\n"),
                  DataError);
  CHECK_THROWS_AS(config::ExperimentConfig::parse("[embeddings]\nkind = bogus\n"), DataError);
  CHECK_THROWS_AS(config::ExperimentConfig::parse("[training]\npolicy = bogus\n"), DataError);
  CHECK_THROWS_AS(config::ExperimentConfig::parse("[evaluation]\nbackend = bogus\n"), DataError);
}

TEST_CASE("config: comments and whitespace are tolerated") {
  config::ExperimentConfig cfg = config::ExperimentConfig::parse(
      "# a comment\n[corpus]\n  seed = 9   # trailing comment\n\n");
  CHECK(cfg.corpus.seed == 9);
}

TEST_CASE("config: sweep threshold list parses") {
  config::ExperimentConfig cfg =
      config::ExperimentConfig::parse("[evaluation]\nmin_length_sweep = 0.5,1,2.5\n");
  auto sweep = cfg.evaluation.sweep_thresholds();
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[0] == doctest::Approx(0.5));
  CHECK(sweep[2] == doctest::Approx(2.5));
}

TEST_CASE("cli: gen-data writes a deterministic corpus and respects --force") {
  TempDir dir("satforge_cli_gen");
  const std::string cfg_path = dir.str("exp.cfg");
  std::ofstream(cfg_path) << tiny_config_text();

  REQUIRE(run_cli("gen-data --config " + cfg_path + " --out " + dir.str("corpus")) == 0);
  const std::string manifest = slurp(dir.path / "corpus" / "manifest.txt");

  // One manifest line per utterance besides the comment header.
  std::size_t lines = 0;
  std::istringstream ms(manifest);
  std::string line;
  while (std::getline(ms, line))
    if (!line.empty() && line[0] != '#') ++lines;
  CHECK(lines == 96);  // 6 speakers x 16 utterances

  // A non-empty output directory is refused without --force.
  CHECK(run_cli("gen-data --config " + cfg_path + " --out " + dir.str("corpus")) == 2);
  REQUIRE(run_cli("gen-data --config " + cfg_path + " --out " + dir.str("corpus") + " --force") ==
          0);
  CHECK(slurp(dir.path / "corpus" / "manifest.txt") == manifest);

  for (const char* kind : {"oracle-full", "oracle-speaker", "oracle-full-noisy", "oracle-frame"})
    CHECK(fs::exists(dir.path / "corpus" / ("embeddings_" + std::string(kind) + ".tsv")));
}

TEST_CASE("cli: train, eval and report pipeline") {
  TempDir dir("satforge_cli_train");
  const std::string cfg_path = dir.str("exp.cfg");
  std::ofstream(cfg_path) << tiny_config_text();
  REQUIRE(run_cli("gen-data --config " + cfg_path + " --out " + dir.str("corpus")) == 0);

  // SI baseline.
  REQUIRE(run_cli("train --si --config " + cfg_path + " --corpus " + dir.str("corpus") +
                  " --out " + dir.str("si")) == 0);
  CHECK(fs::exists(dir.path / "si" / "checkpoint.bin"));
  CHECK(fs::exists(dir.path / "si" / "run_manifest.cfg"));
  CHECK(fs::exists(dir.path / "si" / "report.csv"));

  // Stage-2 adaptive training plus a policy variant; names must differ.
  REQUIRE(run_cli("train --sat --config " + cfg_path + " --corpus " + dir.str("corpus") +
                  " --si-checkpoint " + dir.str("si") + "/checkpoint.bin --out " +
                  dir.str("sat")) == 0);
  REQUIRE(run_cli("train --sat --config " + cfg_path + " --corpus " + dir.str("corpus") +
                  " --si-checkpoint " + dir.str("si") + "/checkpoint.bin --policy freeze-main" +
                  " --out " + dir.str("sat_frozen")) == 0);
  const std::string r1 = slurp(dir.path / "sat" / "report.csv");
  const std::string r2 = slurp(dir.path / "sat_frozen" / "report.csv");
  CHECK(r1 != r2);

  // Unknown mechanism names are usage errors.
  CHECK(run_cli("train --sat --config " + cfg_path + " --corpus " + dir.str("corpus") +
                " --si-checkpoint " + dir.str("si") + "/checkpoint.bin --mechanism bogus" +
                " --out " + dir.str("bad")) == 1);

  // eval-asr on the SI checkpoint.
  REQUIRE(run_cli("eval-asr --config " + cfg_path + " --corpus " + dir.str("corpus") +
                  " --checkpoint " + dir.str("si") + "/checkpoint.bin --out " +
                  dir.str("eval")) == 0);
  CHECK(fs::exists(dir.path / "eval" / "report.csv"));

  // report merges runs from the same corpus and refuses other corpora.
  REQUIRE(run_cli("report --out " + dir.str("merged") + " --baseline si-cmn " + dir.str("si") +
                  " " + dir.str("sat")) == 0);
  CHECK(fs::exists(dir.path / "merged" / "combined.csv"));
  CHECK(fs::exists(dir.path / "merged" / "comparison.csv"));

  // A run against a different corpus must be refused.
  std::string other_cfg = tiny_config_text();
  other_cfg.replace(other_cfg.find("seed = 5"), 8, "seed = 6");
  const std::string cfg2_path = dir.str("exp2.cfg");
  std::ofstream(cfg2_path) << other_cfg;
  REQUIRE(run_cli("gen-data --config " + cfg2_path + " --out " + dir.str("corpus2")) == 0);
  REQUIRE(run_cli("train --si --config " + cfg2_path + " --corpus " + dir.str("corpus2") +
                  " --out " + dir.str("si2")) == 0);
  CHECK(run_cli("report --out " + dir.str("merged2") + " " + dir.str("si") + " " +
                dir.str("si2")) == 2);

  // Mismatched corpus/config fingerprints are data errors.
  CHECK(run_cli("train --si --config " + cfg2_path + " --corpus " + dir.str("corpus") +
                " --out " + dir.str("bad2")) == 2);
}

TEST_CASE("cli: eval-spk reports zero error for clean speaker embeddings") {
  TempDir dir("satforge_cli_spk");
  const std::string cfg_path = dir.str("exp.cfg");
  std::ofstream(cfg_path) << tiny_config_text();
  REQUIRE(run_cli("gen-data --config " + cfg_path + " --out " + dir.str("corpus")) == 0);
  REQUIRE(run_cli("eval-spk --config " + cfg_path + " --corpus " + dir.str("corpus") +
                  " --embedding oracle-speaker --backend cosine --out " + dir.str("spk")) == 0);
  const std::string eer_csv = slurp(dir.path / "spk" / "eer.csv");
  CHECK(eer_csv.find("cosine,speaker,0,0.0000") != std::string::npos);
  CHECK(fs::exists(dir.path / "spk" / "trials_speaker.txt"));
  CHECK(fs::exists(dir.path / "spk" / "scores_cosine_speaker.txt"));

  // Subset analysis and sweep rows via flags.
  REQUIRE(run_cli("eval-spk --config " + cfg_path + " --corpus " + dir.str("corpus") +
                  " --embedding oracle-full --backend cosine --subset-max-sec 1.2" +
                  " --min-length 0.25 --out " + dir.str("spk_sub")) == 0);
  const std::string sub_csv = slurp(dir.path / "spk_sub" / "eer.csv");
  CHECK(sub_csv.find("cosine,subset,") != std::string::npos);
  CHECK(sub_csv.find("cosine,speaker,0.25,") != std::string::npos);

  // Missing tables are data errors.
  fs::remove(dir.path / "corpus" / "embeddings_oracle-full.tsv");
  CHECK(run_cli("eval-spk --config " + cfg_path + " --corpus " + dir.str("corpus") +
                " --embedding oracle-full --backend cosine --out " + dir.str("spk2")) == 2);
}

TEST_CASE("cli: usage errors exit with 1") {
  CHECK(run_cli("") == 1);
  CHECK(run_cli("bogus-subcommand") == 1);
  CHECK(run_cli("train") == 1);  // missing required options
}

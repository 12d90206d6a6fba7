// tests/cli-test.cc

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "base/error.h"
#include "base/io.h"
#include "cli/commands.h"
#include "cli/config.h"
#include "cli/synth.h"
#include "corpus/manifest.h"
#include "testutil.h"

using namespace speechmark;
using speechmark::testing::TempDir;

TEST_CASE("config: file sections, comments and unknown keys") {
  TempDir dir("config_file");
  std::string path = dir.File("run.cfg");
  WriteTextFile(path,
                "# experiment configuration\n"
                "[ngram]\n"
                "order = 3\n"
                "smoothing = kneser-ney  ; inline comment\n"
                "\n"
                "[cv]\n"
                "k_folds = 5\n"
                "seed = 11\n");
  RunConfig config;
  config.LoadFile(path);
  CHECK(config.pipeline.ngram_order == 3);
  CHECK(config.pipeline.smoothing == Smoothing::kKneserNey);
  CHECK(config.pipeline.k_folds == 5);
  CHECK(config.pipeline.cv_seed == 11);

  std::string bad = dir.File("bad.cfg");
  WriteTextFile(bad, "[ngram]\nordr = 3\n");
  RunConfig other;
  CHECK_THROWS_AS(other.LoadFile(bad), ConfigError);
  WriteTextFile(bad, "order = 3\n");  // key before any section
  CHECK_THROWS_AS(other.LoadFile(bad), ConfigError);
  WriteTextFile(bad, "[ngram]\norder = x\n");
  CHECK_THROWS_AS(other.LoadFile(bad), ConfigError);
}

TEST_CASE("config: flags override the environment which overrides the file") {
  TempDir dir("config_prec");
  std::string path = dir.File("run.cfg");
  WriteTextFile(path, "[ubm]\ncomponents = 4\niters = 3\n[svm]\nc = 2.0\n");
  ::setenv("SPEECHMARK_UBM_COMPONENTS", "8", 1);
  ::setenv("SPEECHMARK_SVM_C", "4.0", 1);
  RunConfig config = ParseRunConfig({"--config", path, "--svm.c", "8.0"});
  ::unsetenv("SPEECHMARK_UBM_COMPONENTS");
  ::unsetenv("SPEECHMARK_SVM_C");
  CHECK(config.pipeline.ubm_components == 8);   // env beats file
  CHECK(config.pipeline.ubm.iterations == 3);   // file value survives
  CHECK(config.pipeline.svm.c == 8.0);          // flag beats env
}

TEST_CASE("config: flag forms and aliases") {
  RunConfig config = ParseRunConfig({"--manifest", "m.csv", "--workdir", "w",
                                     "--jobs", "3", "--grid", "table4",
                                     "--ngram.order=4"});
  CHECK(config.manifest == "m.csv");
  CHECK(config.workdir == "w");
  CHECK(config.pipeline.jobs == 3);
  CHECK(config.ablate_grid == "table4");
  CHECK(config.pipeline.ngram_order == 4);
  CHECK_THROWS_AS(ParseRunConfig({"--nonsense.key", "1"}), ConfigError);
  CHECK_THROWS_AS(ParseRunConfig({"--ngram.order"}), ConfigError);
  CHECK_THROWS_AS(ParseRunConfig({"evaluate"}), ConfigError);
}

TEST_CASE("config: list-valued grid keys") {
  RunConfig config = ParseRunConfig({"--ablate.ubm_grid", "8,4,2,1",
                                     "--ablate.rank_grid", "4,2",
                                     "--ablate.ngram_orders", "2"});
  CHECK(config.grids.ubm_grid == std::vector<int>{8, 4, 2, 1});
  CHECK(config.grids.rank_grid == std::vector<int>{4, 2});
  CHECK(config.grids.ngram_orders == std::vector<int>{2});
  CHECK_THROWS_AS(ParseRunConfig({"--ablate.ubm_grid", ""}), ConfigError);
}

TEST_CASE("config: stage fingerprints react only to their slice") {
  RunConfig base;
  RunConfig frontend_changed = base;
  frontend_changed.Set("frontend.num_coeffs", "13");
  RunConfig svm_changed = base;
  svm_changed.Set("svm.c", "9.0");

  CHECK(base.FrontendFingerprint() != frontend_changed.FrontendFingerprint());
  CHECK(base.FrontendFingerprint() == svm_changed.FrontendFingerprint());
  CHECK(base.StageFingerprint({}) != svm_changed.StageFingerprint({}));
  CHECK(base.StageFingerprint({}) == RunConfig{}.StageFingerprint({}));
  CHECK(base.FrontendFingerprint().size() == 16);
}

TEST_CASE("config: pipeline fingerprint ignores the worker count") {
  PipelineConfig a;
  PipelineConfig b = a;
  b.jobs = 7;
  CHECK(a.Fingerprint() == b.Fingerprint());
  b.cv_seed = 2;
  CHECK(a.Fingerprint() != b.Fingerprint());
}

TEST_CASE("synth: deterministic corpus, balanced classes") {
  TempDir dir("synth_det");
  SynthOptions opts;
  opts.cases = 12;
  opts.seed = 5;
  std::string manifest_a = GenerateSyntheticCorpus(dir.File("a"), opts);
  std::string manifest_b = GenerateSyntheticCorpus(dir.File("b"), opts);
  CHECK(ReadTextFile(manifest_a) == ReadTextFile(manifest_b));
  CHECK(ReadTextFile(dir.File("a/audio/case0003.wav")) ==
        ReadTextFile(dir.File("b/audio/case0003.wav")));
  CHECK(ReadTextFile(dir.File("a/text/case0007.txt")) ==
        ReadTextFile(dir.File("b/text/case0007.txt")));

  opts.seed = 6;
  std::string manifest_c = GenerateSyntheticCorpus(dir.File("c"), opts);
  CHECK(ReadTextFile(manifest_a) == ReadTextFile(manifest_c));  // layout is seed-free
  CHECK(ReadTextFile(dir.File("a/audio/case0003.wav")) !=
        ReadTextFile(dir.File("c/audio/case0003.wav")));

  auto recs = LoadManifest(manifest_a, 3, 1);
  int dementia = 0;
  for (const auto &r : recs)
    if (r.label == Label::kDementia) ++dementia;
  CHECK(recs.size() == 12);
  CHECK(dementia == 6);
}

TEST_CASE("synth: option validation") {
  TempDir dir("synth_bad");
  SynthOptions opts;
  opts.cases = 7;  // odd
  CHECK_THROWS_AS(GenerateSyntheticCorpus(dir.File("x"), opts), ConfigError);
}

TEST_CASE("config: the shipped synthetic config file parses cleanly") {
  std::string path = std::string(SPEECHMARK_SOURCE_DIR) + "/configs/synthetic.cfg";
  RunConfig config;
  config.LoadFile(path);
  CHECK(config.pipeline.frontend.num_coeffs == 13);
  CHECK(config.pipeline.ubm_components == 8);
  CHECK(config.synth_cases == 200);
  CHECK(config.pipeline.k_folds == 10);
}

TEST_CASE("dispatch: exit codes for usage and configuration mistakes") {
  CHECK(Dispatch({}) == 2);
  CHECK(Dispatch({"no-such-command"}) == 2);
  CHECK(Dispatch({"evaluate", "--bogus.key", "1"}) == 2);
  // Valid flags but no manifest configured.
  CHECK(Dispatch({"evaluate"}) == 2);
}

TEST_CASE("dispatch: training stages hit their caches on a rerun") {
  TempDir dir("dispatch_cache");
  REQUIRE(Dispatch({"synth-data", "--workdir", dir.path(), "--synth.cases", "8"}) == 0);
  std::vector<std::string> args = {
      "train-ubm", "--manifest", dir.File("synth/manifest.csv"),
      "--workdir",  dir.path(),  "--ubm.components", "2",
      "--ubm.iters", "2",        "--frontend.num_coeffs", "8"};
  std::ostringstream first_run, second_run;
  std::streambuf *saved = std::cout.rdbuf(first_run.rdbuf());
  int rc_first = Dispatch(args);
  std::cout.rdbuf(second_run.rdbuf());
  int rc_second = Dispatch(args);
  std::cout.rdbuf(saved);
  CHECK(rc_first == 0);
  CHECK(rc_second == 0);
  CHECK(first_run.str().find("wrote ") != std::string::npos);
  CHECK(second_run.str().find("cache hit: ") != std::string::npos);
}

TEST_CASE("dispatch: extract writes one fused record per case") {
  TempDir dir("dispatch_extract");
  REQUIRE(Dispatch({"synth-data", "--workdir", dir.path(), "--synth.cases", "10"}) == 0);
  std::vector<std::string> args = {
      "extract",
      "--manifest", dir.File("synth/manifest.csv"),
      "--workdir", dir.path(),
      "--frontend.num_coeffs", "8",
      "--ubm.components", "2", "--ubm.iters", "2",
      "--ivector.rank", "2", "--ivector.iters", "1",
      "--xvector.frame_dim", "6", "--xvector.pre_pool_dim", "8",
      "--xvector.seg6_dim", "3", "--xvector.seg7_dim", "3",
      "--xvector.epochs", "2", "--xvector.chunk_min", "40",
      "--xvector.chunk_max", "60"};
  std::ostringstream captured;
  std::streambuf *saved = std::cout.rdbuf(captured.rdbuf());
  int rc = Dispatch(args);
  std::cout.rdbuf(saved);
  REQUIRE(rc == 0);
  std::string vectors_path;
  for (const auto &entry : std::filesystem::directory_iterator(dir.path())) {
    std::string name = entry.path().filename().string();
    if (name.rfind("vectors_", 0) == 0) vectors_path = entry.path().string();
  }
  REQUIRE(!vectors_path.empty());
  std::istringstream lines(ReadTextFile(vectors_path));
  std::string line;
  int records = 0;
  while (std::getline(lines, line)) {
    CHECK(line.find("\"id\"") != std::string::npos);
    CHECK(line.find("\"ppl\"") != std::string::npos);
    CHECK(line.find("\"ivector\"") != std::string::npos);
    CHECK(line.find("\"xvector\"") != std::string::npos);
    ++records;
  }
  CHECK(records == 10);
}

TEST_CASE("dispatch: synthetic corpus then validation end to end") {
  TempDir dir("dispatch_e2e");
  CHECK(Dispatch({"synth-data", "--workdir", dir.path(), "--synth.cases", "8"}) == 0);
  CHECK(FileExists(dir.File("synth/manifest.csv")));
  CHECK(Dispatch({"ingest-validate", "--manifest", dir.File("synth/manifest.csv"),
                  "--workdir", dir.path()}) == 0);
  // A stage failure (manifest pointing nowhere) exits 1.
  CHECK(Dispatch({"ingest-validate", "--manifest", dir.File("missing.csv"),
                  "--workdir", dir.path()}) == 1);
}

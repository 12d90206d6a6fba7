// tests/fusion-test.cc

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

#include <cmath>

#include "base/error.h"
#include "base/rng.h"
#include "fusion/ablation.h"
#include "fusion/cv.h"
#include "testutil.h"

using namespace speechmark;

namespace {

FusionVector MakeVector(std::initializer_list<double> values) {
  PerplexityPair unused{1.0, 1.0};
  (void)unused;
  Eigen::VectorXd v(static_cast<long>(values.size()));
  long i = 0;
  for (double x : values) v(i++) = x;
  FusionVector out;
  out.values = v;
  out.layout.has_ppl = false;
  out.layout.ivec_dim = static_cast<int>(values.size());
  out.layout.xvec_dim = 0;
  return out;
}

// Two linearly separable clusters at +/- (2, 2).
void SeparableToySet(int n_per_class, uint64_t seed,
                     std::vector<FusionVector> *examples,
                     std::vector<Label> *labels) {
  Rng rng(seed);
  for (int i = 0; i < 2 * n_per_class; ++i) {
    bool positive = i < n_per_class;
    double cx = positive ? 2.0 : -2.0;
    examples->push_back(MakeVector({cx + 0.3 * rng.Gaussian(), cx + 0.3 * rng.Gaussian()}));
    labels->push_back(positive ? Label::kDementia : Label::kControl);
  }
}

TokenSequence ChainSample(bool class_a, int len, Rng *rng) {
  const int v = 10;
  TokenSequence seq;
  int state = static_cast<int>(rng->UniformInt(v));
  for (int i = 0; i < len; ++i) {
    seq.push_back("t" + std::to_string(state));
    double r = rng->UniformDouble();
    state = (r < 0.75) ? (state + (class_a ? 1 : 3)) % v
                       : static_cast<int>(rng->UniformInt(v));
  }
  return seq;
}

// In-memory dataset: class-dependent Markov text and class-shifted
// Gaussian features, fully separable on both tracks.
std::vector<CaseData> SyntheticCases(int n, int k_folds, uint64_t seed,
                                     bool random_labels = false) {
  Rng rng(seed);
  std::vector<CaseData> cases(n);
  for (int i = 0; i < n; ++i) {
    bool class_a = (i % 2) == 0;
    CaseData &data = cases[i];
    data.id = "case" + std::to_string(i);
    bool labeled_a = random_labels ? rng.UniformDouble() < 0.5 : class_a;
    data.label = labeled_a ? Label::kDementia : Label::kControl;
    data.fold = i % k_folds;
    data.tokens = ChainSample(class_a, 40, &rng);
    data.features.frames.resize(60, 5);
    double shift = class_a ? 1.2 : -1.2;
    for (int t = 0; t < 60; ++t)
      for (int d = 0; d < 5; ++d)
        data.features.frames(t, d) = rng.Gaussian() + shift;
  }
  return cases;
}

PipelineConfig TinyPipeline() {
  PipelineConfig config;
  config.frontend.num_coeffs = 5;
  config.ngram_order = 2;
  config.ubm_components = 2;
  config.ubm.iterations = 3;
  config.ivector_rank = 3;
  config.tv.iterations = 2;
  config.xvec_frame_dim = 8;
  config.xvec_pre_pool_dim = 16;
  config.xvec_seg6_dim = 4;
  config.xvec_seg7_dim = 4;
  config.xvec.epochs = 6;
  config.xvec.chunk_min = 30;
  config.xvec.chunk_max = 50;
  config.xvec.learning_rate = 0.05;
  config.svm.max_epochs = 300;
  config.k_folds = 5;
  return config;
}

}  // namespace

TEST_CASE("fuse: block order, widths and the log transform") {
  PerplexityPair ppl{std::exp(1.0), std::exp(2.0)};
  Eigen::VectorXd ivec = Eigen::VectorXd::LinSpaced(4, 0.0, 3.0);
  Eigen::VectorXd xvec = Eigen::VectorXd::Constant(3, -1.0);
  FusionVector all = Fuse(&ppl, &ivec, &xvec);
  REQUIRE(all.values.size() == 2 + 4 + 3);
  CHECK(all.values(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(all.values(1) == doctest::Approx(2.0).epsilon(1e-12));
  for (int i = 0; i < 4; ++i) CHECK(all.values(2 + i) == ivec(i));
  for (int i = 0; i < 3; ++i) CHECK(all.values(6 + i) == -1.0);

  FusionVector ppl_only = Fuse(&ppl, nullptr, nullptr);
  CHECK(ppl_only.values.size() == 2);
  CHECK(ppl_only.layout.TotalDim() == 2);

  FusionVector ivec_only = Fuse(nullptr, &ivec, nullptr);
  CHECK(ivec_only.values.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(ivec_only.values(i) == ivec(i));
}

TEST_CASE("fuse: full-scale widths give the 1026-dimensional vector") {
  PerplexityPair ppl{12.0, 15.0};
  Eigen::VectorXd ivec = Eigen::VectorXd::Zero(512);
  Eigen::VectorXd xvec = Eigen::VectorXd::Zero(512);
  CHECK(Fuse(&ppl, &ivec, &xvec).values.size() == 1026);
}

TEST_CASE("fuse: rejects empty and non-finite input") {
  CHECK_THROWS_AS(Fuse(nullptr, nullptr, nullptr), ConfigError);
  PerplexityPair bad{-1.0, 2.0};
  CHECK_THROWS_AS(Fuse(&bad, nullptr, nullptr), InputError);
  Eigen::VectorXd nan_vec = Eigen::VectorXd::Constant(3, std::nan(""));
  CHECK_THROWS_AS(Fuse(nullptr, &nan_vec, nullptr), InputError);
}

TEST_CASE("fuse: injective for a fixed layout") {
  Rng rng(3);
  Eigen::VectorXd a(4), b(4);
  for (int i = 0; i < 4; ++i) {
    a(i) = rng.Gaussian();
    b(i) = a(i);
  }
  b(2) += 1e-9;
  FusionVector va = Fuse(nullptr, &a, nullptr);
  FusionVector vb = Fuse(nullptr, &b, nullptr);
  CHECK((va.values - vb.values).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("svm: separable clusters are fit perfectly") {
  std::vector<FusionVector> examples;
  std::vector<Label> labels;
  SeparableToySet(25, 5, &examples, &labels);
  SvmModel model = SvmModel::Train(examples, labels);
  for (size_t i = 0; i < examples.size(); ++i)
    CHECK(model.Predict(examples[i]).label == labels[i]);
  // Held-out points from the same clusters.
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    bool positive = i % 2 == 0;
    double cx = positive ? 2.0 : -2.0;
    FusionVector probe = MakeVector({cx + 0.3 * rng.Gaussian(), cx + 0.3 * rng.Gaussian()});
    CHECK(model.Predict(probe).label ==
          (positive ? Label::kDementia : Label::kControl));
  }
  // The objective history never increases.
  const auto &history = model.objective_history();
  REQUIRE(history.size() >= 2);
  for (size_t i = 1; i < history.size(); ++i) CHECK(history[i] <= history[i - 1] + 1e-12);
}

TEST_CASE("svm: flipping labels negates the decision function") {
  std::vector<FusionVector> examples;
  std::vector<Label> labels;
  SeparableToySet(20, 7, &examples, &labels);
  SvmModel model = SvmModel::Train(examples, labels);
  std::vector<Label> flipped;
  for (Label l : labels)
    flipped.push_back(l == Label::kDementia ? Label::kControl : Label::kDementia);
  SvmModel negated = SvmModel::Train(examples, flipped);
  for (const auto &ex : examples) {
    double a = model.Predict(ex).score;
    double b = negated.Predict(ex).score;
    CHECK(a == doctest::Approx(-b).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("svm: duplicated dataset takes the identical optimization path") {
  std::vector<FusionVector> examples;
  std::vector<Label> labels;
  SeparableToySet(15, 9, &examples, &labels);
  SvmModel base = SvmModel::Train(examples, labels);
  std::vector<FusionVector> doubled = examples;
  doubled.insert(doubled.end(), examples.begin(), examples.end());
  std::vector<Label> doubled_labels = labels;
  doubled_labels.insert(doubled_labels.end(), labels.begin(), labels.end());
  SvmModel twice = SvmModel::Train(doubled, doubled_labels);
  CHECK((base.weights() - twice.weights()).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(std::abs(base.bias() - twice.bias()) < 1e-6);
  for (const auto &ex : examples)
    CHECK(base.Predict(ex).score ==
          doctest::Approx(twice.Predict(ex).score).epsilon(1e-6));
}

TEST_CASE("svm: a zero score breaks the tie toward Control") {
  // Mirror-image points with interleaved labels: every gradient term
  // cancels its twin exactly, the bias stays at 0.0, and the standardizer
  // mean point scores exactly zero.
  std::vector<FusionVector> examples;
  std::vector<Label> labels;
  for (int i = 0; i < 10; ++i) {
    double s = (i % 2 == 0) ? 1.0 : -1.0;
    examples.push_back(MakeVector({s * 2.0, s * 2.0}));
    labels.push_back(s > 0 ? Label::kDementia : Label::kControl);
  }
  SvmModel model = SvmModel::Train(examples, labels);
  FusionVector center = MakeVector({0.0, 0.0});
  SvmPrediction prediction = model.Predict(center);
  CHECK(prediction.score == 0.0);
  CHECK(prediction.label == Label::kControl);
}

TEST_CASE("svm: training preconditions and layout checks") {
  std::vector<FusionVector> examples = {MakeVector({1.0, 1.0}), MakeVector({1.5, 0.5})};
  std::vector<Label> labels = {Label::kDementia, Label::kDementia};
  CHECK_THROWS_AS(SvmModel::Train(examples, labels), TrainingError);

  labels[1] = Label::kControl;
  SvmModel model = SvmModel::Train(examples, labels);
  FusionVector wrong = MakeVector({1.0, 2.0, 3.0});
  CHECK_THROWS_AS(model.Predict(wrong), ConsistencyError);
}

TEST_CASE("svm: model file round trip") {
  speechmark::testing::TempDir dir("svm_io");
  std::vector<FusionVector> examples;
  std::vector<Label> labels;
  SeparableToySet(10, 11, &examples, &labels);
  SvmModel model = SvmModel::Train(examples, labels);
  std::string path = dir.File("svm.bin");
  model.Save(path);
  SvmModel loaded = SvmModel::Load(path);
  for (const auto &ex : examples)
    CHECK(model.Predict(ex).score == loaded.Predict(ex).score);
}

TEST_CASE("metrics: the arithmetic identities hold") {
  ConfusionCounts confusion{31, 30, 5, 6};
  MetricsReport report = ComputeMetrics(confusion, {}, "fp");
  CHECK(report.accuracy == doctest::Approx(100.0 * 61.0 / 72.0).epsilon(1e-12));
  CHECK(report.accuracy == doctest::Approx(84.7).epsilon(1e-3));
  double precision_pos = 31.0 / 36.0, precision_neg = 30.0 / 36.0;
  double recall_pos = 31.0 / 37.0, recall_neg = 30.0 / 35.0;
  CHECK(report.precision ==
        doctest::Approx(100.0 * 0.5 * (precision_pos + precision_neg)).epsilon(1e-12));
  CHECK(report.recall ==
        doctest::Approx(100.0 * 0.5 * (recall_pos + recall_neg)).epsilon(1e-12));
  double f1_pos = 2 * precision_pos * recall_pos / (precision_pos + recall_pos);
  double f1_neg = 2 * precision_neg * recall_neg / (precision_neg + recall_neg);
  CHECK(report.f1 == doctest::Approx(100.0 * 0.5 * (f1_pos + f1_neg)).epsilon(1e-12));
  // Degenerate denominators stay defined.
  MetricsReport empty = ComputeMetrics(ConfusionCounts{}, {}, "fp");
  CHECK(empty.accuracy == 0.0);
  CHECK(empty.f1 == 0.0);
}

TEST_CASE("run_cv: separable synthetic dataset scores at least 90 percent") {
  std::vector<CaseData> cases = SyntheticCases(40, 5, 13);
  PipelineConfig config = TinyPipeline();
  MetricsReport report = RunCrossValidation(cases, config);
  CHECK(report.confusion.Total() == 40);
  CHECK(report.accuracy >= 90.0);
  CHECK(report.per_fold.size() == 5);
}

TEST_CASE("run_cv: random labels score near chance") {
  std::vector<CaseData> cases = SyntheticCases(200, 10, 17, /*random_labels=*/true);
  PipelineConfig config = TinyPipeline();
  config.k_folds = 10;
  config.use_ivec = false;
  config.use_xvec = false;  // perplexity block only; the text carries no label signal
  MetricsReport report = RunCrossValidation(cases, config);
  CHECK(report.accuracy >= 40.0);
  CHECK(report.accuracy <= 60.0);
}

TEST_CASE("run_cv: identical runs produce identical reports") {
  std::vector<CaseData> cases = SyntheticCases(30, 3, 19);
  PipelineConfig config = TinyPipeline();
  config.k_folds = 3;
  MetricsReport a = RunCrossValidation(cases, config);
  MetricsReport b = RunCrossValidation(cases, config);
  CHECK(EvaluationJson(a) == EvaluationJson(b));
  CHECK(a.config_fingerprint == b.config_fingerprint);
}

TEST_CASE("run_cv: worker count does not change the report") {
  std::vector<CaseData> cases = SyntheticCases(30, 3, 21);
  PipelineConfig config = TinyPipeline();
  config.k_folds = 3;
  config.jobs = 1;
  MetricsReport serial = RunCrossValidation(cases, config);
  config.jobs = 2;
  MetricsReport threaded = RunCrossValidation(cases, config);
  CHECK(EvaluationJson(serial) == EvaluationJson(threaded));
}

TEST_CASE("run_cv: a planted test id in training trips the leakage guard") {
  std::vector<CaseData> cases = SyntheticCases(30, 3, 23);
  PipelineConfig config = TinyPipeline();
  config.k_folds = 3;
  config.use_ivec = false;
  config.use_xvec = false;
  CvHooks hooks;
  hooks.corrupt_train_split = [](int fold, std::vector<const CaseData *> *train,
                                 const std::vector<const CaseData *> &test) {
    if (fold == 1) train->push_back(test.front());
  };
  CHECK_THROWS_AS(RunCrossValidation(cases, config, &hooks), LeakageError);
}

TEST_CASE("run_cv: configuration preconditions") {
  std::vector<CaseData> cases = SyntheticCases(10, 2, 29);
  PipelineConfig config = TinyPipeline();
  config.k_folds = 1;
  CHECK_THROWS_AS(RunCrossValidation(cases, config), ConfigError);
  config.k_folds = 2;
  config.use_ppl = config.use_ivec = config.use_xvec = false;
  CHECK_THROWS_AS(RunCrossValidation(cases, config), ConfigError);
  config.use_ppl = true;
  cases[0].fold = 7;  // outside [0, k)
  CHECK_THROWS_AS(RunCrossValidation(cases, config), ConfigError);
}

TEST_CASE("ablation: grid structures are fixed per table") {
  PipelineConfig base = TinyPipeline();
  AblationGrids grids;
  auto table3 = BuildAblationGrid("table3", base, grids);
  REQUIRE(table3.size() == 6);
  CHECK(table3[0].row_label == "2-gram good-turing");
  CHECK(table3[1].row_label == "2-gram kneser-ney");
  CHECK(table3[5].row_label == "4-gram kneser-ney");
  for (const auto &cell : table3) {
    CHECK(cell.config.use_ppl);
    CHECK_FALSE(cell.config.use_ivec);
    CHECK_FALSE(cell.config.use_xvec);
  }

  auto table4 = BuildAblationGrid("table4", base, grids);
  REQUIRE(table4.size() == 16);
  CHECK(table4[0].row_label == "512/512");
  CHECK(table4[15].row_label == "64/64");

  auto table5 = BuildAblationGrid("table5", base, grids);
  REQUIRE(table5.size() == 7);
  CHECK(table5[0].row_label == "Yes/No/No");
  CHECK(table5[6].row_label == "Yes/Yes/Yes");
  CHECK(table5[6].config.use_ppl);
  CHECK(table5[6].config.use_ivec);
  CHECK(table5[6].config.use_xvec);

  CHECK_THROWS_AS(BuildAblationGrid("table9", base, grids), ConfigError);
}

TEST_CASE("ablation: cell failures carry the cell identity") {
  std::vector<CaseData> cases = SyntheticCases(20, 4, 37);
  PipelineConfig base = TinyPipeline();
  base.k_folds = 4;
  AblationGrids grids;
  grids.ubm_grid = {1};
  grids.rank_grid = {8};  // rank 8 >= 1 * 5 supervector dims, must fail
  auto cells = BuildAblationGrid("table4", base, grids);
  REQUIRE(cells.size() == 1);
  try {
    RunAblation(cases, cells, 1);
    FAIL("cell failure did not propagate");
  } catch (const Error &e) {
    std::string message = e.what();
    CHECK(message.find("table4") != std::string::npos);
    CHECK(message.find("1/8") != std::string::npos);
  }
}

TEST_CASE("ablation: a text-only grid runs end to end") {
  std::vector<CaseData> cases = SyntheticCases(40, 5, 31);
  PipelineConfig base = TinyPipeline();
  AblationGrids grids;
  grids.ngram_orders = {2, 3};
  auto cells = BuildAblationGrid("table3", base, grids);
  REQUIRE(cells.size() == 4);
  auto results = RunAblation(cases, cells, 1);
  REQUIRE(results.size() == 4);
  for (const auto &result : results) {
    CHECK(result.report.confusion.Total() == 40);
    CHECK(result.report.accuracy > 50.0);  // the chains are separable
  }
  std::string table = AblationTextTable(results);
  CHECK(table.find("N-gram") != std::string::npos);
  CHECK(table.find("Smoothing Method") != std::string::npos);
  CHECK(table.find("F1-Score") != std::string::npos);
  std::string jsonl = AblationJsonl(results);
  int lines = 0;
  for (char c : jsonl)
    if (c == '\n') ++lines;
  CHECK(lines == 4);
}

// fusion/cv.cc

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

#include "fusion/cv.h"

#include <algorithm>

#include "base/error.h"
#include "base/io.h"
#include "base/parallel.h"
#include "corpus/transcript.h"
#include "corpus/wav.h"
#include "xvector/tdnn.h"

namespace speechmark {

std::vector<CaseData> LoadCases(const std::vector<Recording> &recordings,
                                const PipelineConfig &config) {
  bool need_audio = config.use_ivec || config.use_xvec;
  bool need_text = config.use_ppl;
  std::vector<CaseData> cases(recordings.size());
  ParallelFor(config.jobs, recordings.size(), [&](size_t i) {
    const Recording &rec = recordings[i];
    CaseData data;
    data.id = rec.id;
    data.label = rec.label;
    data.fold = rec.fold;
    if (need_text) {
      try {
        data.tokens = NormalizeTranscript(ReadTextFile(rec.transcript_path),
                                          config.strip_chat);
      } catch (const Error &e) {
        throw IoError("case " + rec.id + ": " + e.what());
      }
    }
    if (need_audio) {
      try {
        AudioSignal signal = ReadAudio(rec.audio_path, config.target_rate);
        data.features = ExtractMfcc(signal, config.frontend);
        if (config.apply_cmvn) data.features = Cmvn(data.features);
      } catch (const Error &e) {
        throw IoError("case " + rec.id + ": " + e.what());
      }
    }
    cases[i] = std::move(data);
  });
  return cases;
}

void GuardLeakage(const std::string &stage,
                  const std::vector<const CaseData *> &used,
                  const std::set<std::string> &test_ids) {
  for (const CaseData *data : used) {
    if (test_ids.count(data->id) > 0)
      throw LeakageError("test id " + data->id + " leaked into training stage " +
                         stage);
  }
}

namespace {

// Everything trained on one fold's training split.
struct FoldModels {
  NgramModel ngram_dementia;
  NgramModel ngram_control;
  GmmModel ubm;
  TotalVariabilityModel tv;
  XvectorNet net;
};

FusionVector FuseCase(const CaseData &data, const PipelineConfig &config,
                      const FoldModels &models) {
  PerplexityPair ppl;
  Eigen::VectorXd ivec, xvec;
  if (config.use_ppl) {
    SM_REQUIRE(!data.tokens.empty(), InputError,
               "case " + data.id + " has an empty transcript");
    ppl = ScoreCase(models.ngram_dementia, models.ngram_control, data.tokens);
  }
  if (config.use_ivec)
    ivec = models.tv.Extract(AccumulateStats(models.ubm, data.features));
  if (config.use_xvec) xvec = models.net.Embed(data.features);
  return Fuse(config.use_ppl ? &ppl : nullptr,
              config.use_ivec ? &ivec : nullptr,
              config.use_xvec ? &xvec : nullptr);
}

FoldModels TrainFoldModels(const std::vector<const CaseData *> &train,
                           const std::set<std::string> &test_ids,
                           const PipelineConfig &config) {
  FoldModels models;
  if (config.use_ppl) {
    for (Label label : {Label::kDementia, Label::kControl}) {
      std::vector<const CaseData *> class_cases;
      for (const CaseData *data : train)
        if (data->label == label) class_cases.push_back(data);
      std::string stage = std::string("ngram-") + LabelName(label);
      GuardLeakage(stage, class_cases, test_ids);
      SM_REQUIRE(!class_cases.empty(), TrainingError,
                 "no " + LabelName(label) + " cases in the training folds");
      std::vector<TokenSequence> corpus;
      corpus.reserve(class_cases.size());
      for (const CaseData *data : class_cases) corpus.push_back(data->tokens);
      NgramModel model = NgramModel::Train(corpus, config.ngram_order,
                                           config.smoothing, config.ngram);
      if (label == Label::kDementia)
        models.ngram_dementia = std::move(model);
      else
        models.ngram_control = std::move(model);
    }
  }

  if (config.use_ivec) {
    GuardLeakage("ubm", train, test_ids);
    std::vector<FeatureMatrix> features;
    features.reserve(train.size());
    for (const CaseData *data : train) features.push_back(data->features);
    models.ubm = TrainUbm(features, config.ubm_components, config.ubm).model;

    GuardLeakage("t-matrix", train, test_ids);
    std::vector<BaumWelchStats> stats;
    stats.reserve(train.size());
    for (const CaseData *data : train)
      stats.push_back(AccumulateStats(models.ubm, data->features));
    models.tv = TrainTotalVariability(stats, models.ubm, config.ivector_rank,
                                      config.tv)
                    .model;
  }

  if (config.use_xvec) {
    GuardLeakage("xvector", train, test_ids);
    std::vector<XvectorExample> examples;
    examples.reserve(train.size());
    for (const CaseData *data : train)
      examples.push_back({&data->features,
                          data->label == Label::kDementia ? 1 : 0});
    XvectorNet net =
        XvectorNet::Initialize(config.MakeXvectorConfig(), config.xvec.seed);
    models.net = TrainXvector(std::move(net), examples, config.xvec).net;
  }
  return models;
}

}  // namespace

MetricsReport RunCrossValidation(const std::vector<CaseData> &cases,
                                 const PipelineConfig &config,
                                 const CvHooks *hooks) {
  SM_REQUIRE(config.k_folds >= 2, ConfigError, "cross-validation needs k >= 2");
  SM_REQUIRE(config.use_ppl || config.use_ivec || config.use_xvec, ConfigError,
             "at least one fusion block must be active");
  SM_REQUIRE(!cases.empty(), InputError, "empty dataset");
  for (const auto &data : cases)
    SM_REQUIRE(data.fold >= 0 && data.fold < config.k_folds, ConfigError,
               "case " + data.id + " has no valid fold assignment");

  std::vector<ConfusionCounts> fold_confusion(config.k_folds);
  // One slot per fold; plain chars so parallel workers never share a word.
  std::vector<char> fold_used(config.k_folds, 0);

  ParallelFor(config.jobs, static_cast<size_t>(config.k_folds), [&](size_t f) {
    int fold = static_cast<int>(f);
    std::vector<const CaseData *> train, test;
    for (const auto &data : cases)
      (data.fold == fold ? test : train).push_back(&data);
    if (test.empty()) return;
    fold_used[f] = 1;

    std::set<std::string> test_ids;
    for (const CaseData *data : test) test_ids.insert(data->id);
    if (hooks != nullptr && hooks->corrupt_train_split)
      hooks->corrupt_train_split(fold, &train, test);

    FoldModels models = TrainFoldModels(train, test_ids, config);

    GuardLeakage("svm", train, test_ids);
    std::vector<FusionVector> train_vectors;
    std::vector<Label> train_labels;
    train_vectors.reserve(train.size());
    for (const CaseData *data : train) {
      train_vectors.push_back(FuseCase(*data, config, models));
      train_labels.push_back(data->label);
    }
    SvmModel svm = SvmModel::Train(train_vectors, train_labels, config.svm);

    ConfusionCounts confusion;
    for (const CaseData *data : test) {
      SvmPrediction prediction = svm.Predict(FuseCase(*data, config, models));
      bool actual_positive = data->label == Label::kDementia;
      bool predicted_positive = prediction.label == Label::kDementia;
      if (actual_positive && predicted_positive) ++confusion.tp;
      if (!actual_positive && !predicted_positive) ++confusion.tn;
      if (!actual_positive && predicted_positive) ++confusion.fp;
      if (actual_positive && !predicted_positive) ++confusion.fn;
    }
    fold_confusion[f] = confusion;
  });

  ConfusionCounts total;
  std::vector<FoldMetrics> per_fold;
  for (int f = 0; f < config.k_folds; ++f) {
    if (!fold_used[f]) continue;
    total += fold_confusion[f];
    FoldMetrics fm;
    fm.fold = f;
    fm.confusion = fold_confusion[f];
    fm.accuracy = fm.confusion.Total() > 0
                      ? 100.0 * static_cast<double>(fm.confusion.tp + fm.confusion.tn) /
                            static_cast<double>(fm.confusion.Total())
                      : 0.0;
    per_fold.push_back(fm);
  }
  return ComputeMetrics(total, std::move(per_fold), config.Fingerprint());
}

}  // namespace speechmark

// cli/commands.cc

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

#include "cli/commands.h"

#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "base/error.h"
#include "base/hash.h"
#include "base/io.h"
#include "base/parallel.h"
#include "cli/config.h"
#include "cli/synth.h"
#include "corpus/manifest.h"
#include "corpus/transcript.h"
#include "corpus/wav.h"
#include "frontend/feature-cache.h"
#include "fusion/ablation.h"
#include "fusion/cv.h"
#include "xvector/tdnn-train.h"

namespace speechmark {

namespace {

std::string Percent1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return std::string(buf);
}

// Pipeline fingerprint extended with the grid definition, so an ablation
// rerun only cache-hits when the cells themselves are unchanged.
std::string AblateFingerprint(const RunConfig &config) {
  std::ostringstream dump;
  dump << config.pipeline.CanonicalDump();
  dump << "ablate.grid=" << config.ablate_grid << "\n";
  auto put_list = [&dump](const char *key, const std::vector<int> &values) {
    dump << key << "=";
    for (size_t i = 0; i < values.size(); ++i)
      dump << (i ? "," : "") << values[i];
    dump << "\n";
  };
  put_list("ablate.ngram_orders", config.grids.ngram_orders);
  put_list("ablate.ubm_grid", config.grids.ubm_grid);
  put_list("ablate.rank_grid", config.grids.rank_grid);
  return HashToHex(HashString(dump.str()));
}

std::vector<Recording> LoadRecordings(const RunConfig &config) {
  SM_REQUIRE(!config.manifest.empty(), ConfigError,
             "paths.manifest is required (set it in the config file or with --manifest)");
  return LoadManifest(config.manifest, config.pipeline.k_folds, config.pipeline.cv_seed);
}

// LoadCases plus the on-disk float32 feature cache.  Cached features are
// always read back so a cold and a warm run see identical values.
std::vector<CaseData> LoadCasesCached(const std::vector<Recording> &recordings,
                                      const RunConfig &config,
                                      const PipelineConfig &pipeline) {
  bool need_audio = pipeline.use_ivec || pipeline.use_xvec;
  if (!need_audio || !config.feature_cache)
    return LoadCases(recordings, pipeline);

  EnsureDir(config.CacheDir());
  std::string fp = config.FrontendFingerprint();
  std::vector<CaseData> cases(recordings.size());
  ParallelFor(pipeline.jobs, recordings.size(), [&](size_t i) {
    const Recording &rec = recordings[i];
    CaseData data;
    data.id = rec.id;
    data.label = rec.label;
    data.fold = rec.fold;
    try {
      if (pipeline.use_ppl)
        data.tokens = NormalizeTranscript(ReadTextFile(rec.transcript_path),
                                          pipeline.strip_chat);
      std::string cache_path = config.CacheDir() + "/" + rec.id + "_" + fp + ".feats";
      if (!FileExists(cache_path)) {
        AudioSignal signal = ReadAudio(rec.audio_path, pipeline.target_rate);
        FeatureMatrix features = ExtractMfcc(signal, pipeline.frontend);
        if (pipeline.apply_cmvn) features = Cmvn(features);
        WriteFeatureCache(cache_path, features);
      }
      data.features = ReadFeatureCache(cache_path);
      data.features.frame_shift = pipeline.frontend.shift_ms * 1e-3;
      data.features.frame_length = pipeline.frontend.window_ms * 1e-3;
    } catch (const Error &e) {
      throw IoError("case " + rec.id + ": " + e.what());
    }
    cases[i] = std::move(data);
  });
  return cases;
}

std::vector<TokenSequence> ClassCorpus(const std::vector<CaseData> &cases, Label label) {
  std::vector<TokenSequence> corpus;
  for (const auto &data : cases)
    if (data.label == label) corpus.push_back(data.tokens);
  return corpus;
}

// Whole-dataset model artifacts for the standalone train-* and extract
// commands.  The fold-pure retraining used for evaluation lives in run_cv;
// these artifacts exist for inspection and reuse.
NgramModel TrainOrLoadNgram(Label label, const std::vector<CaseData> &cases,
                            const RunConfig &config) {
  std::string fp = config.StageFingerprint({"corpus.strip_chat", "ngram."});
  std::string path = config.workdir + "/ngram_" + LabelName(label) + "_" + fp + ".txt";
  if (FileExists(path)) {
    std::cout << "cache hit: " << path << "\n";
    return NgramModel::Load(path);
  }
  NgramModel model = NgramModel::Train(ClassCorpus(cases, label),
                                       config.pipeline.ngram_order,
                                       config.pipeline.smoothing, config.pipeline.ngram);
  model.Save(path);
  std::cout << "wrote " << path << "\n";
  return model;
}

GmmModel TrainOrLoadUbm(const std::vector<CaseData> &cases, const RunConfig &config) {
  std::string fp = config.StageFingerprint({"corpus.", "frontend.", "ubm."});
  std::string path = config.workdir + "/ubm_" + fp + ".bin";
  if (FileExists(path)) {
    std::cout << "cache hit: " << path << "\n";
    return GmmModel::Load(path);
  }
  std::vector<FeatureMatrix> features;
  features.reserve(cases.size());
  for (const auto &data : cases) features.push_back(data.features);
  GmmModel model =
      TrainUbm(features, config.pipeline.ubm_components, config.pipeline.ubm).model;
  model.Save(path);
  std::cout << "wrote " << path << "\n";
  return model;
}

TotalVariabilityModel TrainOrLoadTv(const std::vector<CaseData> &cases,
                                    const GmmModel &ubm, const RunConfig &config) {
  std::string fp = config.StageFingerprint({"corpus.", "frontend.", "ubm.", "ivector."});
  std::string path = config.workdir + "/ivector_" + fp + ".bin";
  if (FileExists(path)) {
    std::cout << "cache hit: " << path << "\n";
    return TotalVariabilityModel::Load(path, ubm);
  }
  std::vector<BaumWelchStats> stats;
  stats.reserve(cases.size());
  for (const auto &data : cases) stats.push_back(AccumulateStats(ubm, data.features));
  TotalVariabilityModel model =
      TrainTotalVariability(stats, ubm, config.pipeline.ivector_rank, config.pipeline.tv)
          .model;
  model.Save(path);
  std::cout << "wrote " << path << "\n";
  return model;
}

XvectorNet TrainOrLoadXvector(const std::vector<CaseData> &cases,
                              const RunConfig &config) {
  std::string fp = config.StageFingerprint({"corpus.", "frontend.", "xvector."});
  std::string path = config.workdir + "/xvector_" + fp + ".bin";
  if (FileExists(path)) {
    std::cout << "cache hit: " << path << "\n";
    return XvectorNet::Load(path);
  }
  std::vector<XvectorExample> examples;
  examples.reserve(cases.size());
  for (const auto &data : cases)
    examples.push_back({&data.features, data.label == Label::kDementia ? 1 : 0});
  XvectorNet net = XvectorNet::Initialize(config.pipeline.MakeXvectorConfig(),
                                          config.pipeline.xvec.seed);
  net = TrainXvector(std::move(net), examples, config.pipeline.xvec).net;
  net.Save(path);
  std::cout << "wrote " << path << "\n";
  return net;
}

int CmdSynthData(const RunConfig &config) {
  SynthOptions opts;
  opts.cases = config.synth_cases;
  opts.seed = config.synth_seed;
  opts.sample_rate = config.pipeline.target_rate;
  std::string manifest = GenerateSyntheticCorpus(config.workdir + "/synth", opts);
  std::cout << "synthetic manifest: " << manifest << "\n";
  return 0;
}

int CmdIngestValidate(const RunConfig &config) {
  std::vector<Recording> recordings = LoadRecordings(config);
  std::map<int, std::map<Label, int>> fold_counts;
  double total_seconds = 0.0;
  size_t total_tokens = 0;
  for (const auto &rec : recordings) {
    AudioSignal signal = ReadAudio(rec.audio_path, config.pipeline.target_rate);
    total_seconds += signal.DurationSeconds();
    TokenSequence tokens = NormalizeTranscript(ReadTextFile(rec.transcript_path),
                                               config.pipeline.strip_chat);
    total_tokens += tokens.size();
    fold_counts[rec.fold][rec.label] += 1;
  }
  int dementia = 0, control = 0;
  for (const auto &rec : recordings)
    (rec.label == Label::kDementia ? dementia : control) += 1;
  std::cout << "records: " << recordings.size() << " (Dementia " << dementia
            << ", Control " << control << ")\n";
  std::cout << "audio: " << Percent1(total_seconds) << " s total, tokens: "
            << total_tokens << "\n";
  for (const auto &[fold, counts] : fold_counts) {
    std::cout << "fold " << fold << ":";
    for (const auto &[label, count] : counts)
      std::cout << " " << LabelName(label) << "=" << count;
    std::cout << "\n";
  }
  std::cout << "manifest ok\n";
  return 0;
}

int CmdTrainNgram(const RunConfig &config) {
  PipelineConfig loading = config.pipeline;
  loading.use_ppl = true;
  loading.use_ivec = false;
  loading.use_xvec = false;
  std::vector<CaseData> cases = LoadCasesCached(LoadRecordings(config), config, loading);
  EnsureDir(config.workdir);
  TrainOrLoadNgram(Label::kDementia, cases, config);
  TrainOrLoadNgram(Label::kControl, cases, config);
  return 0;
}

int CmdTrainUbm(const RunConfig &config) {
  PipelineConfig loading = config.pipeline;
  loading.use_ppl = false;
  loading.use_ivec = true;
  loading.use_xvec = false;
  std::vector<CaseData> cases = LoadCasesCached(LoadRecordings(config), config, loading);
  EnsureDir(config.workdir);
  TrainOrLoadUbm(cases, config);
  return 0;
}

int CmdTrainIvector(const RunConfig &config) {
  PipelineConfig loading = config.pipeline;
  loading.use_ppl = false;
  loading.use_ivec = true;
  loading.use_xvec = false;
  std::vector<CaseData> cases = LoadCasesCached(LoadRecordings(config), config, loading);
  EnsureDir(config.workdir);
  GmmModel ubm = TrainOrLoadUbm(cases, config);
  TrainOrLoadTv(cases, ubm, config);
  return 0;
}

int CmdTrainXvector(const RunConfig &config) {
  PipelineConfig loading = config.pipeline;
  loading.use_ppl = false;
  loading.use_ivec = false;
  loading.use_xvec = true;
  std::vector<CaseData> cases = LoadCasesCached(LoadRecordings(config), config, loading);
  EnsureDir(config.workdir);
  TrainOrLoadXvector(cases, config);
  return 0;
}

int CmdExtract(const RunConfig &config) {
  const PipelineConfig &pipeline = config.pipeline;
  std::vector<CaseData> cases = LoadCasesCached(LoadRecordings(config), config, pipeline);
  EnsureDir(config.workdir);

  NgramModel ngram_dem, ngram_con;
  GmmModel ubm;
  TotalVariabilityModel tv;
  XvectorNet net;
  if (pipeline.use_ppl) {
    ngram_dem = TrainOrLoadNgram(Label::kDementia, cases, config);
    ngram_con = TrainOrLoadNgram(Label::kControl, cases, config);
  }
  if (pipeline.use_ivec) {
    ubm = TrainOrLoadUbm(cases, config);
    tv = TrainOrLoadTv(cases, ubm, config);
  }
  if (pipeline.use_xvec) net = TrainOrLoadXvector(cases, config);

  std::ostringstream out;
  for (const auto &data : cases) {
    nlohmann::json record;
    record["id"] = data.id;
    record["label"] = LabelName(data.label);
    record["fold"] = data.fold;
    if (pipeline.use_ppl) {
      PerplexityPair ppl = ScoreCase(ngram_dem, ngram_con, data.tokens);
      record["ppl"] = {ppl.ppl_dementia, ppl.ppl_control};
    }
    if (pipeline.use_ivec) {
      Eigen::VectorXd ivec = tv.Extract(AccumulateStats(ubm, data.features));
      record["ivector"] = std::vector<double>(ivec.data(), ivec.data() + ivec.size());
    }
    if (pipeline.use_xvec) {
      Eigen::VectorXd xvec = net.Embed(data.features);
      record["xvector"] = std::vector<double>(xvec.data(), xvec.data() + xvec.size());
    }
    out << record.dump() << "\n";
  }
  std::string path = config.workdir + "/vectors_" + config.StageFingerprint({}) + ".jsonl";
  WriteTextFile(path, out.str());
  std::cout << "wrote " << path << "\n";
  return 0;
}

int CmdEvaluate(const RunConfig &config) {
  EnsureDir(config.workdir);
  std::string base = config.workdir + "/report_" + config.pipeline.Fingerprint();
  if (FileExists(base + ".json") && FileExists(base + ".txt")) {
    std::cout << "cache hit: " << base << ".json\n";
    std::cout << ReadTextFile(base + ".txt");
    return 0;
  }
  std::vector<CaseData> cases = LoadCasesCached(LoadRecordings(config), config, config.pipeline);
  MetricsReport report = RunCrossValidation(cases, config.pipeline);
  WriteTextFile(base + ".json", EvaluationJson(report));
  WriteTextFile(base + ".txt", EvaluationText(report));
  std::cout << EvaluationText(report);
  std::cout << "accuracy " << Percent1(report.accuracy) << "\n";
  std::cout << "wrote " << base << ".json\n";
  std::cout << "wrote " << base << ".txt\n";
  return 0;
}

int CmdAblate(const RunConfig &config) {
  EnsureDir(config.workdir);
  std::string base = config.workdir + "/ablation_" + config.ablate_grid + "_" +
                     AblateFingerprint(config);
  if (FileExists(base + ".jsonl") && FileExists(base + ".txt")) {
    std::cout << "cache hit: " << base << ".jsonl\n";
    std::cout << ReadTextFile(base + ".txt");
    return 0;
  }
  std::vector<AblationCell> cells =
      BuildAblationGrid(config.ablate_grid, config.pipeline, config.grids);
  // One load covering every block any cell needs.
  PipelineConfig loading = config.pipeline;
  loading.use_ppl = loading.use_ivec = loading.use_xvec = false;
  for (const auto &cell : cells) {
    loading.use_ppl = loading.use_ppl || cell.config.use_ppl;
    loading.use_ivec = loading.use_ivec || cell.config.use_ivec;
    loading.use_xvec = loading.use_xvec || cell.config.use_xvec;
  }
  std::vector<CaseData> cases = LoadCasesCached(LoadRecordings(config), config, loading);

  std::vector<AblationResult> results = RunAblation(cases, cells, config.pipeline.jobs);
  WriteTextFile(base + ".jsonl", AblationJsonl(results));
  std::string table = AblationTextTable(results);
  WriteTextFile(base + ".txt", table);
  std::cout << table;
  std::cout << "wrote " << base << ".jsonl\n";
  std::cout << "wrote " << base << ".txt\n";
  return 0;
}

}  // namespace

std::string UsageText() {
  return
      "usage: speechmark <subcommand> [--config FILE] [--key value ...]\n"
      "\n"
      "subcommands:\n"
      "  synth-data       generate the deterministic synthetic corpus\n"
      "  ingest-validate  load a manifest, check audio/transcripts, print fold stats\n"
      "  train-ngram      train class-conditional n-gram models on the whole manifest\n"
      "  train-ubm        train the universal background model\n"
      "  train-ivector    train the total-variability matrix (trains the UBM if needed)\n"
      "  train-xvector    train the x-vector net\n"
      "  extract          write fused per-case vectors using whole-dataset models\n"
      "  evaluate         leakage-safe k-fold cross-validation, writes a report\n"
      "  ablate           run a table3/table4/table5 grid of cross-validations\n"
      "\n"
      "flags: --config FILE, --manifest PATH, --workdir DIR, --jobs N, --grid NAME,\n"
      "       plus any config key as --section.key value (see README)\n";
}

int Dispatch(const std::vector<std::string> &args) {
  if (args.empty()) {
    std::cerr << UsageText();
    return 2;
  }
  std::string command = args[0];
  std::vector<std::string> rest(args.begin() + 1, args.end());
  RunConfig config;
  try {
    config = ParseRunConfig(rest);
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    if (command == "synth-data") return CmdSynthData(config);
    if (command == "ingest-validate") return CmdIngestValidate(config);
    if (command == "train-ngram") return CmdTrainNgram(config);
    if (command == "train-ubm") return CmdTrainUbm(config);
    if (command == "train-ivector") return CmdTrainIvector(config);
    if (command == "train-xvector") return CmdTrainXvector(config);
    if (command == "extract") return CmdExtract(config);
    if (command == "evaluate") return CmdEvaluate(config);
    if (command == "ablate") return CmdAblate(config);
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: unknown subcommand \"" << command << "\"\n" << UsageText();
  return 2;
}

}  // namespace speechmark

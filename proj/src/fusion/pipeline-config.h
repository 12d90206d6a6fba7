// fusion/pipeline-config.h

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

#ifndef SPEECHMARK_FUSION_PIPELINE_CONFIG_H_
#define SPEECHMARK_FUSION_PIPELINE_CONFIG_H_

#include <string>

#include "frontend/mfcc.h"
#include "fusion/svm.h"
#include "gmm/gmm-ubm.h"
#include "ivector/ivector.h"
#include "ngram/ngram-model.h"
#include "xvector/tdnn-train.h"

namespace speechmark {

// Everything one cross-validation run depends on.  The fingerprint hashes
// the canonical dump, so two runs with equal fingerprints are reruns of the
// same experiment.
struct PipelineConfig {
  // ingestion / frontend
  int target_rate = 16000;
  bool strip_chat = false;
  bool apply_cmvn = true;
  FrontendConfig frontend;

  // class-conditional n-gram models
  int ngram_order = 2;
  Smoothing smoothing = Smoothing::kGoodTuring;
  NgramOptions ngram;

  // UBM / total variability
  int ubm_components = 8;
  UbmTrainOptions ubm;
  int ivector_rank = 8;
  TvTrainOptions tv;

  // x-vector net
  int xvec_frame_dim = 16;
  int xvec_pre_pool_dim = 64;
  int xvec_seg6_dim = 8;
  int xvec_seg7_dim = 8;
  XvectorTrainOptions xvec;

  SvmOptions svm;

  // active fusion blocks
  bool use_ppl = true;
  bool use_ivec = true;
  bool use_xvec = true;

  int k_folds = 10;
  uint64_t cv_seed = 1;
  int jobs = 1;

  XvectorConfig MakeXvectorConfig() const;

  // Sorted key=value lines covering every field above except jobs (worker
  // count does not change results).
  std::string CanonicalDump() const;
  std::string Fingerprint() const;  // 16 hex digits
};

}  // namespace speechmark

#endif  // SPEECHMARK_FUSION_PIPELINE_CONFIG_H_

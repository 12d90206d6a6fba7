// fusion/cv.h

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

#ifndef SPEECHMARK_FUSION_CV_H_
#define SPEECHMARK_FUSION_CV_H_

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "corpus/manifest.h"
#include "fusion/metrics.h"
#include "fusion/pipeline-config.h"

namespace speechmark {

// One loaded case: tokens for the n-gram track, normalized features for the
// acoustic tracks.
struct CaseData {
  std::string id;
  Label label = Label::kControl;
  int fold = -1;
  TokenSequence tokens;
  FeatureMatrix features;
};

// Reads transcripts and audio for every recording and extracts features.
// Blocks that are switched off skip their inputs (a ppl-only run never
// touches audio).
std::vector<CaseData> LoadCases(const std::vector<Recording> &recordings,
                                const PipelineConfig &config);

// Test seam: lets a fault-injection test corrupt the train split before the
// training stages run, which the leakage guard must catch.
struct CvHooks {
  std::function<void(int fold, std::vector<const CaseData *> *train,
                     const std::vector<const CaseData *> &test)>
      corrupt_train_split;
};

// Throws LeakageError when any id in `used` belongs to the test fold.
// Every training stage runs its inputs through this check.
void GuardLeakage(const std::string &stage,
                  const std::vector<const CaseData *> &used,
                  const std::set<std::string> &test_ids);

// Strict k-fold protocol: all upstream models (class n-grams, UBM, T,
// x-vector net) and the SVM are retrained per fold on the other k-1 folds;
// the held-out fold is scored and confusion counts aggregate over folds.
MetricsReport RunCrossValidation(const std::vector<CaseData> &cases,
                                 const PipelineConfig &config,
                                 const CvHooks *hooks = nullptr);

}  // namespace speechmark

#endif  // SPEECHMARK_FUSION_CV_H_

// fusion/metrics.h

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

#ifndef SPEECHMARK_FUSION_METRICS_H_
#define SPEECHMARK_FUSION_METRICS_H_

#include <cstdint>
#include <string>
#include <vector>

namespace speechmark {

// Dementia is the positive class throughout.
struct ConfusionCounts {
  int64_t tp = 0;
  int64_t tn = 0;
  int64_t fp = 0;
  int64_t fn = 0;

  int64_t Total() const { return tp + tn + fp + fn; }
  ConfusionCounts &operator+=(const ConfusionCounts &other);
};

struct FoldMetrics {
  int fold = 0;
  ConfusionCounts confusion;
  double accuracy = 0.0;  // percent
};

// Accuracy plus macro-averaged precision/recall/F1, all as percentages.
// Macro F1 is the mean of the per-class F1 scores.
struct MetricsReport {
  ConfusionCounts confusion;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<FoldMetrics> per_fold;
  std::string config_fingerprint;
};

MetricsReport ComputeMetrics(const ConfusionCounts &confusion,
                             std::vector<FoldMetrics> per_fold,
                             std::string config_fingerprint);

}  // namespace speechmark

#endif  // SPEECHMARK_FUSION_METRICS_H_

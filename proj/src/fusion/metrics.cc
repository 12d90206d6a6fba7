// fusion/metrics.cc

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

#include "fusion/metrics.h"

namespace speechmark {

namespace {

double SafeRatio(double num, double den) { return den > 0 ? num / den : 0.0; }

}  // namespace

ConfusionCounts &ConfusionCounts::operator+=(const ConfusionCounts &other) {
  tp += other.tp;
  tn += other.tn;
  fp += other.fp;
  fn += other.fn;
  return *this;
}

MetricsReport ComputeMetrics(const ConfusionCounts &confusion,
                             std::vector<FoldMetrics> per_fold,
                             std::string config_fingerprint) {
  MetricsReport report;
  report.confusion = confusion;
  report.per_fold = std::move(per_fold);
  report.config_fingerprint = std::move(config_fingerprint);

  double total = static_cast<double>(confusion.Total());
  report.accuracy = 100.0 * SafeRatio(static_cast<double>(confusion.tp + confusion.tn), total);

  // Per-class precision/recall with Dementia positive, Control negative.
  double precision_pos = SafeRatio(confusion.tp, confusion.tp + confusion.fp);
  double precision_neg = SafeRatio(confusion.tn, confusion.tn + confusion.fn);
  double recall_pos = SafeRatio(confusion.tp, confusion.tp + confusion.fn);
  double recall_neg = SafeRatio(confusion.tn, confusion.tn + confusion.fp);
  double f1_pos = SafeRatio(2.0 * precision_pos * recall_pos, precision_pos + recall_pos);
  double f1_neg = SafeRatio(2.0 * precision_neg * recall_neg, precision_neg + recall_neg);

  report.precision = 100.0 * 0.5 * (precision_pos + precision_neg);
  report.recall = 100.0 * 0.5 * (recall_pos + recall_neg);
  report.f1 = 100.0 * 0.5 * (f1_pos + f1_neg);
  return report;
}

}  // namespace speechmark

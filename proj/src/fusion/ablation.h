// fusion/ablation.h

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

#ifndef SPEECHMARK_FUSION_ABLATION_H_
#define SPEECHMARK_FUSION_ABLATION_H_

#include <string>
#include <vector>

#include "fusion/cv.h"

namespace speechmark {

// Grid values for the ablation tables.
struct AblationGrids {
  std::vector<int> ngram_orders = {2, 3, 4};
  std::vector<int> ubm_grid = {512, 256, 128, 64};
  std::vector<int> rank_grid = {512, 256, 128, 64};
};

struct AblationCell {
  std::string table;      // "table3", "table4" or "table5"
  std::string row_label;  // human-readable row identity
  PipelineConfig config;
};

struct AblationResult {
  AblationCell cell;
  MetricsReport report;
};

// table3: n-gram order x smoothing, perplexity block only (6 cells).
// table4: UBM components x i-vector rank, i-vector block only (16 cells).
// table5: the 7 non-empty block combinations.
std::vector<AblationCell> BuildAblationGrid(const std::string &grid_name,
                                            const PipelineConfig &base,
                                            const AblationGrids &grids);

// Runs one cross-validation per cell.  Cells are independent jobs; each
// cell runs single-threaded internally when jobs > 1.
std::vector<AblationResult> RunAblation(const std::vector<CaseData> &cases,
                                        const std::vector<AblationCell> &cells,
                                        int jobs);

// Machine-readable line-delimited records, one per cell.
std::string AblationJsonl(const std::vector<AblationResult> &results);
// Aligned text table for the grid.
std::string AblationTextTable(const std::vector<AblationResult> &results);

// Single-run report (the `evaluate` command): one JSON record plus a
// per-fold breakdown.
std::string EvaluationJson(const MetricsReport &report);
std::string EvaluationText(const MetricsReport &report);

}  // namespace speechmark

#endif  // SPEECHMARK_FUSION_ABLATION_H_

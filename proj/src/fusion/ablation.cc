// fusion/ablation.cc

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

#include "fusion/ablation.h"

#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "base/error.h"
#include "base/parallel.h"

namespace speechmark {

namespace {

using nlohmann::json;

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return std::string(buf);
}

json ReportToJson(const MetricsReport &report) {
  json j;
  j["fingerprint"] = report.config_fingerprint;
  j["confusion"] = {{"tp", report.confusion.tp},
                    {"tn", report.confusion.tn},
                    {"fp", report.confusion.fp},
                    {"fn", report.confusion.fn}};
  j["metrics"] = {{"accuracy", report.accuracy},
                  {"precision", report.precision},
                  {"recall", report.recall},
                  {"f1", report.f1}};
  json folds = json::array();
  for (const auto &fm : report.per_fold) {
    folds.push_back({{"fold", fm.fold},
                     {"tp", fm.confusion.tp},
                     {"tn", fm.confusion.tn},
                     {"fp", fm.confusion.fp},
                     {"fn", fm.confusion.fn},
                     {"accuracy", fm.accuracy}});
  }
  j["per_fold"] = std::move(folds);
  return j;
}

std::string YesNo(bool v) { return v ? "Yes" : "No"; }

void AppendAligned(std::ostringstream &out,
                   const std::vector<std::vector<std::string>> &rows) {
  if (rows.empty()) return;
  std::vector<size_t> widths(rows[0].size(), 0);
  for (const auto &row : rows)
    for (size_t c = 0; c < row.size(); ++c)
      widths[c] = std::max(widths[c], row[c].size());
  for (const auto &row : rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      out << row[c];
      if (c + 1 < row.size())
        out << std::string(widths[c] - row[c].size() + 2, ' ');
    }
    out << "\n";
  }
}

}  // namespace

std::vector<AblationCell> BuildAblationGrid(const std::string &grid_name,
                                            const PipelineConfig &base,
                                            const AblationGrids &grids) {
  std::vector<AblationCell> cells;
  if (grid_name == "table3") {
    SM_REQUIRE(!grids.ngram_orders.empty(), ConfigError, "empty n-gram grid");
    for (int order : grids.ngram_orders) {
      for (Smoothing smoothing : {Smoothing::kGoodTuring, Smoothing::kKneserNey}) {
        AblationCell cell;
        cell.table = "table3";
        cell.row_label = std::to_string(order) + "-gram " + SmoothingName(smoothing);
        cell.config = base;
        cell.config.use_ppl = true;
        cell.config.use_ivec = false;
        cell.config.use_xvec = false;
        cell.config.ngram_order = order;
        cell.config.smoothing = smoothing;
        cells.push_back(std::move(cell));
      }
    }
  } else if (grid_name == "table4") {
    SM_REQUIRE(!grids.ubm_grid.empty() && !grids.rank_grid.empty(), ConfigError,
               "empty i-vector grid");
    for (int components : grids.ubm_grid) {
      for (int rank : grids.rank_grid) {
        AblationCell cell;
        cell.table = "table4";
        cell.row_label = std::to_string(components) + "/" + std::to_string(rank);
        cell.config = base;
        cell.config.use_ppl = false;
        cell.config.use_ivec = true;
        cell.config.use_xvec = false;
        cell.config.ubm_components = components;
        cell.config.ivector_rank = rank;
        cells.push_back(std::move(cell));
      }
    }
  } else if (grid_name == "table5") {
    // Row order: single modalities first, the full fusion last.
    const bool combos[7][3] = {{true, false, false}, {false, true, false},
                               {false, false, true}, {true, true, false},
                               {true, false, true},  {false, true, true},
                               {true, true, true}};
    for (const auto &combo : combos) {
      AblationCell cell;
      cell.table = "table5";
      cell.config = base;
      cell.config.use_xvec = combo[0];
      cell.config.use_ivec = combo[1];
      cell.config.use_ppl = combo[2];
      cell.row_label = YesNo(combo[0]) + "/" + YesNo(combo[1]) + "/" + YesNo(combo[2]);
      cells.push_back(std::move(cell));
    }
  } else {
    throw ConfigError("unknown ablation grid \"" + grid_name +
                      "\" (expected table3, table4 or table5)");
  }
  return cells;
}

std::vector<AblationResult> RunAblation(const std::vector<CaseData> &cases,
                                        const std::vector<AblationCell> &cells,
                                        int jobs) {
  SM_REQUIRE(!cells.empty(), ConfigError, "empty ablation grid");
  std::vector<AblationResult> results(cells.size());
  ParallelFor(jobs, cells.size(), [&](size_t i) {
    AblationCell cell = cells[i];
    if (jobs > 1) cell.config.jobs = 1;  // cells are the unit of parallelism
    try {
      results[i].report = RunCrossValidation(cases, cell.config);
      results[i].cell = std::move(cell);
    } catch (const Error &e) {
      throw Error("ablation cell " + cell.table + " [" + cell.row_label +
                  "]: " + e.what());
    }
  });
  return results;
}

std::string AblationJsonl(const std::vector<AblationResult> &results) {
  std::ostringstream out;
  for (const auto &result : results) {
    json j = ReportToJson(result.report);
    j["table"] = result.cell.table;
    j["row"] = result.cell.row_label;
    j["params"] = {{"ngram_order", result.cell.config.ngram_order},
                   {"smoothing", SmoothingName(result.cell.config.smoothing)},
                   {"ubm_components", result.cell.config.ubm_components},
                   {"ivector_rank", result.cell.config.ivector_rank},
                   {"use_xvec", result.cell.config.use_xvec},
                   {"use_ivec", result.cell.config.use_ivec},
                   {"use_ppl", result.cell.config.use_ppl}};
    out << j.dump() << "\n";
  }
  return out.str();
}

std::string AblationTextTable(const std::vector<AblationResult> &results) {
  SM_REQUIRE(!results.empty(), ConfigError, "no ablation results");
  const std::string &table = results.front().cell.table;
  std::vector<std::vector<std::string>> rows;
  if (table == "table3") {
    rows.push_back({"N-gram", "Smoothing Method", "Accuracy", "Precision",
                    "Recall", "F1-Score"});
    for (const auto &r : results) {
      rows.push_back({std::to_string(r.cell.config.ngram_order) + "-gram",
                      SmoothingName(r.cell.config.smoothing),
                      Percent(r.report.accuracy), Percent(r.report.precision),
                      Percent(r.report.recall), Percent(r.report.f1)});
    }
  } else if (table == "table4") {
    rows.push_back({"UBM Components", "I-vector Size", "Accuracy", "Precision",
                    "Recall", "F1-Score"});
    for (const auto &r : results) {
      rows.push_back({std::to_string(r.cell.config.ubm_components),
                      std::to_string(r.cell.config.ivector_rank),
                      Percent(r.report.accuracy), Percent(r.report.precision),
                      Percent(r.report.recall), Percent(r.report.f1)});
    }
  } else {
    rows.push_back({"X-vector", "I-vector", "Perplexity", "Accuracy",
                    "Precision", "Recall", "F1-Score"});
    for (const auto &r : results) {
      rows.push_back({YesNo(r.cell.config.use_xvec), YesNo(r.cell.config.use_ivec),
                      YesNo(r.cell.config.use_ppl), Percent(r.report.accuracy),
                      Percent(r.report.precision), Percent(r.report.recall),
                      Percent(r.report.f1)});
    }
  }
  std::ostringstream out;
  AppendAligned(out, rows);
  return out.str();
}

std::string EvaluationJson(const MetricsReport &report) {
  return ReportToJson(report).dump(2) + "\n";
}

std::string EvaluationText(const MetricsReport &report) {
  std::ostringstream out;
  out << "fingerprint  " << report.config_fingerprint << "\n";
  out << "confusion    tp=" << report.confusion.tp << " tn=" << report.confusion.tn
      << " fp=" << report.confusion.fp << " fn=" << report.confusion.fn << "\n";
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Accuracy", "Precision", "Recall", "F1-Score"});
  rows.push_back({Percent(report.accuracy), Percent(report.precision),
                  Percent(report.recall), Percent(report.f1)});
  AppendAligned(out, rows);
  for (const auto &fm : report.per_fold) {
    out << "fold " << fm.fold << "  tp=" << fm.confusion.tp
        << " tn=" << fm.confusion.tn << " fp=" << fm.confusion.fp
        << " fn=" << fm.confusion.fn << "  accuracy=" << Percent(fm.accuracy)
        << "\n";
  }
  return out.str();
}

}  // namespace speechmark

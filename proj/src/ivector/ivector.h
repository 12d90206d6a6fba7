// ivector/ivector.h

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

#ifndef SPEECHMARK_IVECTOR_IVECTOR_H_
#define SPEECHMARK_IVECTOR_IVECTOR_H_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gmm/gmm-ubm.h"

namespace speechmark {

// Zero- and first-order sufficient statistics of one utterance against the
// UBM.  first_order rows are centered with the UBM component means.
struct BaumWelchStats {
  Eigen::VectorXd zero_order;   // N_j, soft frame counts per component
  Eigen::MatrixXd first_order;  // F_j, k x F
  uint64_t ubm_hash = 0;
};

// N_j = sum_t gamma_tj ; F_j = sum_t gamma_tj (x_t - m_j).
BaumWelchStats AccumulateStats(const GmmModel &ubm, const FeatureMatrix &features);

// Low-rank total-variability model: supervector M = m + T w with m the UBM
// mean supervector and Sigma fixed to the UBM variances.
class TotalVariabilityModel {
 public:
  TotalVariabilityModel() = default;
  // t_blocks[c] is the F x R block of rows of T belonging to component c.
  TotalVariabilityModel(std::vector<Eigen::MatrixXd> t_blocks,
                        Eigen::MatrixXd sigma, uint64_t ubm_hash);

  int NumComponents() const { return static_cast<int>(t_blocks_.size()); }
  int Dim() const { return t_blocks_.empty() ? 0 : static_cast<int>(t_blocks_[0].rows()); }
  int Rank() const { return t_blocks_.empty() ? 0 : static_cast<int>(t_blocks_[0].cols()); }
  uint64_t ubm_hash() const { return ubm_hash_; }
  const Eigen::MatrixXd &TBlock(int c) const { return t_blocks_[c]; }

  // Posterior mean of w: (I + T' Sigma^-1 N T)^-1 T' Sigma^-1 F, via a
  // symmetric positive-definite solve.  Stats must carry this model's UBM
  // hash or a ConsistencyError is thrown.
  Eigen::VectorXd Extract(const BaumWelchStats &stats) const;

  void Save(const std::string &path) const;
  static TotalVariabilityModel Load(const std::string &path, const GmmModel &ubm);

 private:
  void PrecomputeGram();

  std::vector<Eigen::MatrixXd> t_blocks_;  // k blocks, F x R
  Eigen::MatrixXd sigma_;                  // k x F diagonal covariance blocks
  uint64_t ubm_hash_ = 0;
  std::vector<Eigen::MatrixXd> gram_;      // T_c' Sigma_c^-1 T_c per component
};

struct TvTrainOptions {
  int iterations = 5;
  uint64_t seed = 1;
};

struct TvTrainResult {
  TotalVariabilityModel model;
  // Mean per-utterance auxiliary objective, evaluated before each update
  // and once after the last; non-decreasing under EM.
  std::vector<double> objective;
};

// EM for T: per-utterance posterior moments of w, closed-form per-component
// row-block update.  T starts from seeded Gaussian noise scaled by
// 0.1 * sqrt(mean UBM variance).
TvTrainResult TrainTotalVariability(const std::vector<BaumWelchStats> &stats,
                                    const GmmModel &ubm, int rank,
                                    const TvTrainOptions &opts);

}  // namespace speechmark

#endif  // SPEECHMARK_IVECTOR_IVECTOR_H_

// gmm/gmm-ubm.h

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

#ifndef SPEECHMARK_GMM_GMM_UBM_H_
#define SPEECHMARK_GMM_GMM_UBM_H_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "frontend/mfcc.h"

namespace speechmark {

// Diagonal-covariance Gaussian mixture: the universal background model.
class GmmModel {
 public:
  GmmModel() = default;
  GmmModel(Eigen::VectorXd weights, Eigen::MatrixXd means, Eigen::MatrixXd variances);

  int NumComponents() const { return static_cast<int>(weights_.size()); }
  int Dim() const { return static_cast<int>(means_.cols()); }

  const Eigen::VectorXd &weights() const { return weights_; }
  const Eigen::MatrixXd &means() const { return means_; }      // k x F
  const Eigen::MatrixXd &variances() const { return variances_; }  // k x F

  // log w_j + log N(x | m_j, Sigma_j) for all j.
  Eigen::VectorXd LogWeightedDensities(const Eigen::VectorXd &frame) const;

  // Posterior responsibilities; sums to 1, computed in log space.
  Eigen::VectorXd Posteriors(const Eigen::VectorXd &frame) const;

  // Total log-likelihood of a feature matrix.
  double LogLikelihood(const FeatureMatrix &features) const;

  // Identity of the parameter set (used to tie Baum-Welch stats and the
  // total-variability model to their UBM).
  uint64_t ParamHash() const;

  void Save(const std::string &path) const;
  static GmmModel Load(const std::string &path);

 private:
  void PrecomputeLogNorm();

  Eigen::VectorXd weights_;
  Eigen::MatrixXd means_;
  Eigen::MatrixXd variances_;
  Eigen::VectorXd log_weights_;
  Eigen::VectorXd log_norm_;  // per-component Gaussian normalizer
};

struct UbmTrainOptions {
  int iterations = 10;
  int kmeans_iterations = 10;
  size_t kmeans_subsample = 10000;  // frames used for initialization
  uint64_t seed = 1;
  double variance_floor_factor = 1e-4;  // times the global feature variance
};

struct UbmTrainResult {
  GmmModel model;
  std::vector<double> log_likelihood;  // per EM iteration, non-decreasing
};

// Seeded k-means initialization followed by diagonal-covariance EM.
// Throws TrainingError when k exceeds the frame count and InputError on
// NaN features.
UbmTrainResult TrainUbm(const std::vector<FeatureMatrix> &features, int k,
                        const UbmTrainOptions &opts);

}  // namespace speechmark

#endif  // SPEECHMARK_GMM_GMM_UBM_H_

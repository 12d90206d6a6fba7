// gmm/gmm-ubm.cc

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

#include "gmm/gmm-ubm.h"

#include <cmath>
#include <limits>

#include "base/error.h"
#include "base/hash.h"
#include "base/io.h"
#include "base/rng.h"

namespace speechmark {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double LogSumExp(const Eigen::VectorXd &v) {
  double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

Eigen::MatrixXd StackFrames(const std::vector<FeatureMatrix> &features) {
  SM_REQUIRE(!features.empty(), TrainingError, "no feature matrices given");
  int dim = features.front().Dim();
  long total = 0;
  for (const auto &f : features) {
    SM_REQUIRE(f.Dim() == dim, InputError, "inconsistent feature dimensions");
    total += f.NumFrames();
  }
  Eigen::MatrixXd stacked(total, dim);
  long row = 0;
  for (const auto &f : features) {
    stacked.middleRows(row, f.NumFrames()) = f.frames;
    row += f.NumFrames();
  }
  return stacked;
}

}  // namespace

GmmModel::GmmModel(Eigen::VectorXd weights, Eigen::MatrixXd means,
                   Eigen::MatrixXd variances)
    : weights_(std::move(weights)),
      means_(std::move(means)),
      variances_(std::move(variances)) {
  SM_REQUIRE(weights_.size() == means_.rows(), InputError,
             "weight/mean size mismatch");
  SM_REQUIRE(means_.rows() == variances_.rows() && means_.cols() == variances_.cols(),
             InputError, "mean/variance shape mismatch");
  SM_REQUIRE((variances_.array() > 0.0).all(), InputError,
             "variances must be strictly positive");
  double weight_sum = weights_.sum();
  SM_REQUIRE(std::abs(weight_sum - 1.0) < 1e-8, InputError,
             "component weights must sum to 1");
  PrecomputeLogNorm();
}

void GmmModel::PrecomputeLogNorm() {
  int k = NumComponents();
  log_weights_.resize(k);
  log_norm_.resize(k);
  for (int j = 0; j < k; ++j) {
    log_weights_(j) = std::log(std::max(weights_(j), 1e-300));
    log_norm_(j) = -0.5 * (Dim() * kLog2Pi + variances_.row(j).array().log().sum());
  }
}

Eigen::VectorXd GmmModel::LogWeightedDensities(const Eigen::VectorXd &frame) const {
  SM_REQUIRE(frame.size() == Dim(), InputError, "frame dimension mismatch");
  Eigen::VectorXd out(NumComponents());
  for (int j = 0; j < NumComponents(); ++j) {
    double quad = ((frame.transpose() - means_.row(j)).array().square() /
                   variances_.row(j).array())
                      .sum();
    out(j) = log_weights_(j) + log_norm_(j) - 0.5 * quad;
  }
  return out;
}

Eigen::VectorXd GmmModel::Posteriors(const Eigen::VectorXd &frame) const {
  Eigen::VectorXd log_dens = LogWeightedDensities(frame);
  double lse = LogSumExp(log_dens);
  return (log_dens.array() - lse).exp();
}

double GmmModel::LogLikelihood(const FeatureMatrix &features) const {
  double total = 0.0;
  for (int t = 0; t < features.NumFrames(); ++t)
    total += LogSumExp(LogWeightedDensities(features.frames.row(t).transpose()));
  return total;
}

uint64_t GmmModel::ParamHash() const {
  Fnv1a h;
  h.Update(static_cast<uint64_t>(NumComponents()));
  h.Update(static_cast<uint64_t>(Dim()));
  for (int j = 0; j < NumComponents(); ++j) {
    h.Update(weights_(j));
    for (int d = 0; d < Dim(); ++d) {
      h.Update(means_(j, d));
      h.Update(variances_(j, d));
    }
  }
  return h.Digest();
}

void GmmModel::Save(const std::string &path) const {
  BinaryWriter out(path, "SMGM", 1);
  out.WriteU32(static_cast<uint32_t>(NumComponents()));
  out.WriteU32(static_cast<uint32_t>(Dim()));
  for (int j = 0; j < NumComponents(); ++j) out.WriteF64(weights_(j));
  for (int j = 0; j < NumComponents(); ++j)
    for (int d = 0; d < Dim(); ++d) out.WriteF64(means_(j, d));
  for (int j = 0; j < NumComponents(); ++j)
    for (int d = 0; d < Dim(); ++d) out.WriteF64(variances_(j, d));
  out.Close();
}

GmmModel GmmModel::Load(const std::string &path) {
  BinaryReader in(path, "SMGM", 1);
  uint32_t k = in.ReadU32();
  uint32_t dim = in.ReadU32();
  Eigen::VectorXd weights(k);
  Eigen::MatrixXd means(k, dim), variances(k, dim);
  for (uint32_t j = 0; j < k; ++j) weights(j) = in.ReadF64();
  for (uint32_t j = 0; j < k; ++j)
    for (uint32_t d = 0; d < dim; ++d) means(j, d) = in.ReadF64();
  for (uint32_t j = 0; j < k; ++j)
    for (uint32_t d = 0; d < dim; ++d) variances(j, d) = in.ReadF64();
  return GmmModel(std::move(weights), std::move(means), std::move(variances));
}

UbmTrainResult TrainUbm(const std::vector<FeatureMatrix> &features, int k,
                        const UbmTrainOptions &opts) {
  SM_REQUIRE(k >= 1, ConfigError, "component count must be >= 1");
  Eigen::MatrixXd data = StackFrames(features);
  SM_REQUIRE(!data.hasNaN(), InputError, "NaN in training features");
  long n = data.rows();
  int dim = static_cast<int>(data.cols());
  SM_REQUIRE(n >= k, TrainingError,
             "component count exceeds the number of training frames");

  Eigen::RowVectorXd global_mean = data.colwise().mean();
  Eigen::RowVectorXd global_var =
      ((data.rowwise() - global_mean).array().square().colwise().sum() / n).matrix();
  Eigen::RowVectorXd var_floor =
      (global_var.array() * opts.variance_floor_factor).max(1e-10).matrix();

  // Seeded k-means on a frame subsample.
  Rng rng(opts.seed);
  size_t sample_size = std::min<size_t>(opts.kmeans_subsample, static_cast<size_t>(n));
  std::vector<size_t> sample = rng.SampleWithoutReplacement(static_cast<size_t>(n), sample_size);
  std::vector<size_t> init = rng.SampleWithoutReplacement(sample.size(), static_cast<size_t>(k));
  Eigen::MatrixXd centroids(k, dim);
  for (int j = 0; j < k; ++j) centroids.row(j) = data.row(static_cast<long>(sample[init[j]]));

  std::vector<int> assignment(sample.size(), 0);
  for (int iter = 0; iter < opts.kmeans_iterations; ++iter) {
    for (size_t i = 0; i < sample.size(); ++i) {
      long best = 0;
      double best_dist = std::numeric_limits<double>::max();
      for (int j = 0; j < k; ++j) {
        double dist = (data.row(static_cast<long>(sample[i])) - centroids.row(j)).squaredNorm();
        if (dist < best_dist) {
          best_dist = dist;
          best = j;
        }
      }
      assignment[i] = static_cast<int>(best);
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (size_t i = 0; i < sample.size(); ++i) {
      sums.row(assignment[i]) += data.row(static_cast<long>(sample[i]));
      counts(assignment[i]) += 1.0;
    }
    for (int j = 0; j < k; ++j) {
      if (counts(j) > 0) {
        centroids.row(j) = sums.row(j) / counts(j);
      } else {
        centroids.row(j) = data.row(static_cast<long>(sample[rng.UniformInt(sample.size())]));
      }
    }
  }

  // Initial mixture from the k-means clustering.
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd means = centroids;
  Eigen::MatrixXd variances(k, dim);
  {
    Eigen::MatrixXd sq_sums = Eigen::MatrixXd::Zero(k, dim);
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (size_t i = 0; i < sample.size(); ++i) {
      const auto row = data.row(static_cast<long>(sample[i]));
      sums.row(assignment[i]) += row;
      sq_sums.row(assignment[i]) += row.array().square().matrix();
      counts(assignment[i]) += 1.0;
    }
    for (int j = 0; j < k; ++j) {
      if (counts(j) > 0.5) {
        means.row(j) = sums.row(j) / counts(j);
        variances.row(j) = (sq_sums.row(j) / counts(j) -
                            means.row(j).array().square().matrix());
      } else {
        variances.row(j) = global_var;
      }
      variances.row(j) = variances.row(j).cwiseMax(var_floor);
      weights(j) = std::max(counts(j) / static_cast<double>(sample.size()), 1e-8);
    }
    weights /= weights.sum();
  }

  GmmModel model(weights, means, variances);
  std::vector<double> history;
  history.reserve(opts.iterations + 1);

  for (int iter = 0; iter <= opts.iterations; ++iter) {
    // E-step; the last pass only records the final log-likelihood.
    Eigen::VectorXd acc_n = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd acc_x = Eigen::MatrixXd::Zero(k, dim);
    Eigen::MatrixXd acc_xx = Eigen::MatrixXd::Zero(k, dim);
    double log_likelihood = 0.0;
    for (long t = 0; t < n; ++t) {
      Eigen::VectorXd frame = data.row(t).transpose();
      Eigen::VectorXd log_dens = model.LogWeightedDensities(frame);
      double lse = LogSumExp(log_dens);
      log_likelihood += lse;
      Eigen::VectorXd gamma = (log_dens.array() - lse).exp();
      acc_n += gamma;
      acc_x += gamma * frame.transpose();
      acc_xx += gamma * frame.array().square().matrix().transpose();
    }
    if (!history.empty()) {
      double prev = history.back();
      double drop = (prev - log_likelihood) / std::max(1.0, std::abs(prev));
      if (drop > 1e-6)
        throw ConsistencyError("EM log-likelihood decreased beyond tolerance");
    }
    history.push_back(log_likelihood);
    if (iter == opts.iterations) break;

    Eigen::VectorXd new_weights = model.weights();
    Eigen::MatrixXd new_means = model.means();
    Eigen::MatrixXd new_vars = model.variances();
    for (int j = 0; j < k; ++j) {
      if (acc_n(j) < 1e-8) continue;  // starved component keeps its parameters
      new_means.row(j) = acc_x.row(j) / acc_n(j);
      new_vars.row(j) = (acc_xx.row(j) / acc_n(j) -
                         new_means.row(j).array().square().matrix())
                            .cwiseMax(var_floor);
      new_weights(j) = acc_n(j) / static_cast<double>(n);
    }
    new_weights = new_weights.cwiseMax(1e-10);
    new_weights /= new_weights.sum();
    model = GmmModel(new_weights, new_means, new_vars);
  }

  UbmTrainResult result;
  result.model = std::move(model);
  result.log_likelihood = std::move(history);
  return result;
}

}  // namespace speechmark

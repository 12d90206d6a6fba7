// ivector/ivector.cc

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

#include "ivector/ivector.h"

#include <cmath>

#include "base/error.h"
#include "base/io.h"
#include "base/rng.h"

namespace speechmark {

BaumWelchStats AccumulateStats(const GmmModel &ubm, const FeatureMatrix &features) {
  SM_REQUIRE(features.Dim() == ubm.Dim(), InputError,
             "feature dimension does not match the UBM");
  int k = ubm.NumComponents();
  int dim = ubm.Dim();
  BaumWelchStats stats;
  stats.zero_order = Eigen::VectorXd::Zero(k);
  stats.first_order = Eigen::MatrixXd::Zero(k, dim);
  stats.ubm_hash = ubm.ParamHash();
  for (int t = 0; t < features.NumFrames(); ++t) {
    Eigen::VectorXd frame = features.frames.row(t).transpose();
    Eigen::VectorXd gamma = ubm.Posteriors(frame);
    stats.zero_order += gamma;
    for (int j = 0; j < k; ++j)
      stats.first_order.row(j) += gamma(j) * (frame.transpose() - ubm.means().row(j));
  }
  return stats;
}

TotalVariabilityModel::TotalVariabilityModel(std::vector<Eigen::MatrixXd> t_blocks,
                                             Eigen::MatrixXd sigma,
                                             uint64_t ubm_hash)
    : t_blocks_(std::move(t_blocks)), sigma_(std::move(sigma)), ubm_hash_(ubm_hash) {
  SM_REQUIRE(!t_blocks_.empty(), InputError, "empty total-variability matrix");
  SM_REQUIRE(sigma_.rows() == static_cast<long>(t_blocks_.size()) &&
                 sigma_.cols() == t_blocks_[0].rows(),
             InputError, "sigma shape mismatch");
  SM_REQUIRE((sigma_.array() > 0.0).all(), InputError,
             "sigma must be strictly positive");
  PrecomputeGram();
}

void TotalVariabilityModel::PrecomputeGram() {
  gram_.clear();
  gram_.reserve(t_blocks_.size());
  for (size_t c = 0; c < t_blocks_.size(); ++c) {
    Eigen::MatrixXd scaled = t_blocks_[c].array().colwise() /
                             sigma_.row(static_cast<long>(c)).transpose().array();
    gram_.push_back(t_blocks_[c].transpose() * scaled);
  }
}

Eigen::VectorXd TotalVariabilityModel::Extract(const BaumWelchStats &stats) const {
  SM_REQUIRE(stats.ubm_hash == ubm_hash_, ConsistencyError,
             "stats were accumulated against a different UBM");
  int k = NumComponents();
  int rank = Rank();
  SM_REQUIRE(stats.zero_order.size() == k && stats.first_order.rows() == k &&
                 stats.first_order.cols() == Dim(),
             InputError, "stats shape mismatch");
  Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(rank, rank);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rank);
  for (int c = 0; c < k; ++c) {
    precision += stats.zero_order(c) * gram_[c];
    rhs += t_blocks_[c].transpose() *
           (stats.first_order.row(c).transpose().array() / sigma_.row(c).transpose().array())
               .matrix();
  }
  Eigen::LLT<Eigen::MatrixXd> chol(precision);
  SM_REQUIRE(chol.info() == Eigen::Success, ConsistencyError,
             "i-vector precision matrix is not positive definite");
  return chol.solve(rhs);
}

void TotalVariabilityModel::Save(const std::string &path) const {
  BinaryWriter out(path, "SMTV", 1);
  out.WriteU64(ubm_hash_);
  out.WriteU32(static_cast<uint32_t>(NumComponents()));
  out.WriteU32(static_cast<uint32_t>(Dim()));
  out.WriteU32(static_cast<uint32_t>(Rank()));
  for (const auto &block : t_blocks_)
    for (long d = 0; d < block.rows(); ++d)
      for (long r = 0; r < block.cols(); ++r) out.WriteF64(block(d, r));
  out.Close();
}

TotalVariabilityModel TotalVariabilityModel::Load(const std::string &path,
                                                  const GmmModel &ubm) {
  BinaryReader in(path, "SMTV", 1);
  uint64_t hash = in.ReadU64();
  SM_REQUIRE(hash == ubm.ParamHash(), ConsistencyError,
             "total-variability model was trained against a different UBM");
  uint32_t k = in.ReadU32();
  uint32_t dim = in.ReadU32();
  uint32_t rank = in.ReadU32();
  SM_REQUIRE(static_cast<int>(k) == ubm.NumComponents() &&
                 static_cast<int>(dim) == ubm.Dim(),
             ConsistencyError, "model shape does not match the UBM");
  std::vector<Eigen::MatrixXd> blocks(k, Eigen::MatrixXd(dim, rank));
  for (uint32_t c = 0; c < k; ++c)
    for (uint32_t d = 0; d < dim; ++d)
      for (uint32_t r = 0; r < rank; ++r) blocks[c](d, r) = in.ReadF64();
  return TotalVariabilityModel(std::move(blocks), ubm.variances(), hash);
}

TvTrainResult TrainTotalVariability(const std::vector<BaumWelchStats> &stats,
                                    const GmmModel &ubm, int rank,
                                    const TvTrainOptions &opts) {
  SM_REQUIRE(rank >= 1, ConfigError, "i-vector rank must be >= 1");
  int k = ubm.NumComponents();
  int dim = ubm.Dim();
  SM_REQUIRE(rank < k * dim, ConfigError,
             "i-vector rank must be below the supervector dimension");
  SM_REQUIRE(!stats.empty(), TrainingError, "no stats to train on");
  uint64_t ubm_hash = ubm.ParamHash();
  for (const auto &s : stats)
    SM_REQUIRE(s.ubm_hash == ubm_hash, ConsistencyError,
               "training stats were accumulated against a different UBM");

  // Seeded Gaussian start, scaled to the feature spread.
  Rng rng(opts.seed);
  double scale = 0.1 * std::sqrt(ubm.variances().mean());
  std::vector<Eigen::MatrixXd> blocks(k, Eigen::MatrixXd(dim, rank));
  for (int c = 0; c < k; ++c)
    for (int d = 0; d < dim; ++d)
      for (int r = 0; r < rank; ++r) blocks[c](d, r) = scale * rng.Gaussian();

  TotalVariabilityModel model(std::move(blocks), ubm.variances(), ubm_hash);
  std::vector<double> objective;
  objective.reserve(opts.iterations + 1);

  for (int iter = 0; iter <= opts.iterations; ++iter) {
    std::vector<Eigen::MatrixXd> gram(k);
    for (int c = 0; c < k; ++c) {
      Eigen::MatrixXd scaled = model.TBlock(c).array().colwise() /
                               ubm.variances().row(c).transpose().array();
      gram[c] = model.TBlock(c).transpose() * scaled;
    }
    std::vector<Eigen::MatrixXd> acc_a(k, Eigen::MatrixXd::Zero(rank, rank));
    std::vector<Eigen::MatrixXd> acc_b(k, Eigen::MatrixXd::Zero(dim, rank));
    double obj = 0.0;
    for (const auto &s : stats) {
      Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(rank, rank);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rank);
      for (int c = 0; c < k; ++c) {
        precision += s.zero_order(c) * gram[c];
        rhs += model.TBlock(c).transpose() *
               (s.first_order.row(c).transpose().array() /
                ubm.variances().row(c).transpose().array())
                   .matrix();
      }
      Eigen::LLT<Eigen::MatrixXd> chol(precision);
      SM_REQUIRE(chol.info() == Eigen::Success, ConsistencyError,
                 "posterior precision is not positive definite");
      Eigen::VectorXd w_mean = chol.solve(rhs);
      Eigen::MatrixXd cov = chol.solve(Eigen::MatrixXd::Identity(rank, rank));
      double log_det = 2.0 * Eigen::MatrixXd(chol.matrixL()).diagonal().array().log().sum();
      obj += 0.5 * (w_mean.dot(rhs) - log_det);
      Eigen::MatrixXd w_moment = cov + w_mean * w_mean.transpose();
      for (int c = 0; c < k; ++c) {
        acc_a[c] += s.zero_order(c) * w_moment;
        acc_b[c] += s.first_order.row(c).transpose() * w_mean.transpose();
      }
    }
    objective.push_back(obj / static_cast<double>(stats.size()));
    if (iter == opts.iterations) break;

    std::vector<Eigen::MatrixXd> new_blocks(k);
    for (int c = 0; c < k; ++c) {
      if (acc_a[c].trace() < 1e-10) {
        new_blocks[c] = model.TBlock(c);  // component never observed
        continue;
      }
      Eigen::LDLT<Eigen::MatrixXd> solver(acc_a[c]);
      new_blocks[c] = solver.solve(acc_b[c].transpose()).transpose();
    }
    model = TotalVariabilityModel(std::move(new_blocks), ubm.variances(), ubm_hash);
  }

  TvTrainResult result;
  result.model = std::move(model);
  result.objective = std::move(objective);
  return result;
}

}  // namespace speechmark

// fusion/svm.cc

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

#include "fusion/svm.h"

#include <cmath>
#include <set>

#include "base/error.h"
#include "base/io.h"

namespace speechmark {

namespace {

double LabelSign(Label label) { return label == Label::kDementia ? 1.0 : -1.0; }

double PrimalObjective(const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                       const Eigen::VectorXd &w, double b, double lambda) {
  Eigen::VectorXd margins = y.array() * ((x * w).array() + b);
  double hinge = (1.0 - margins.array()).max(0.0).mean();
  return 0.5 * lambda * w.squaredNorm() + hinge;
}

}  // namespace

SvmModel SvmModel::Train(const std::vector<FusionVector> &examples,
                         const std::vector<Label> &labels,
                         const SvmOptions &opts) {
  SM_REQUIRE(!examples.empty(), TrainingError, "empty SVM training set");
  SM_REQUIRE(examples.size() == labels.size(), InputError,
             "example/label count mismatch");
  SM_REQUIRE(opts.c > 0, ConfigError, "svm C must be positive");
  std::set<Label> present(labels.begin(), labels.end());
  SM_REQUIRE(present.size() == 2, TrainingError,
             "both classes must appear in the SVM training set");

  const FusionLayout layout = examples.front().layout;
  long n = static_cast<long>(examples.size());
  long dim = layout.TotalDim();
  Eigen::MatrixXd x(n, dim);
  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i) {
    SM_REQUIRE(examples[i].layout == layout, InputError,
               "inconsistent fusion layouts in the SVM training set");
    SM_REQUIRE(examples[i].values.allFinite(), InputError,
               "non-finite fusion vector");
    x.row(i) = examples[i].values.transpose();
    y(i) = LabelSign(labels[i]);
  }

  SvmModel model;
  model.layout_ = layout;
  // The standardizer is fit on the training examples only; constant
  // dimensions keep scale 1 so they standardize to zero.
  model.standardizer_mean_ = x.colwise().mean().transpose();
  model.standardizer_scale_.resize(dim);
  Eigen::MatrixXd centered = x.rowwise() - model.standardizer_mean_.transpose();
  for (long d = 0; d < dim; ++d) {
    double sd = std::sqrt(centered.col(d).squaredNorm() / n);
    model.standardizer_scale_(d) = sd < 1e-12 ? 1.0 : sd;
    centered.col(d) /= model.standardizer_scale_(d);
  }

  double lambda = 1.0 / opts.c;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
  double b = 0.0;
  double eta = opts.eta0;
  double obj = PrimalObjective(centered, y, w, b, lambda);
  model.objective_history_.clear();
  model.objective_history_.push_back(obj);

  for (int epoch = 0; epoch < opts.max_epochs; ++epoch) {
    Eigen::VectorXd margins = y.array() * ((centered * w).array() + b);
    Eigen::VectorXd grad_w = lambda * w;
    double grad_b = 0.0;
    for (long i = 0; i < n; ++i) {
      if (margins(i) < 1.0) {
        grad_w -= y(i) * centered.row(i).transpose() / static_cast<double>(n);
        grad_b -= y(i) / static_cast<double>(n);
      }
    }
    Eigen::VectorXd w_next = w - eta * grad_w;
    double b_next = b - eta * grad_b;
    double obj_next = PrimalObjective(centered, y, w_next, b_next, lambda);
    if (obj_next <= obj) {
      w = std::move(w_next);
      b = b_next;
      obj = obj_next;
    } else {
      eta *= 0.5;  // epoch consumed by the rejected step
    }
    model.objective_history_.push_back(obj);
    if (eta < 1e-14) break;
  }

  model.weights_ = std::move(w);
  model.bias_ = b;
  return model;
}

SvmPrediction SvmModel::Predict(const FusionVector &vector) const {
  SM_REQUIRE(vector.layout == layout_, ConsistencyError,
             "fusion layout does not match the trained model (" +
                 vector.layout.Describe() + " vs " + layout_.Describe() + ")");
  Eigen::VectorXd z = (vector.values - standardizer_mean_).array() /
                      standardizer_scale_.array();
  SvmPrediction out;
  out.score = weights_.dot(z) + bias_;
  out.label = out.score > 0.0 ? Label::kDementia : Label::kControl;
  return out;
}

void SvmModel::Save(const std::string &path) const {
  BinaryWriter out(path, "SMSV", 1);
  out.WriteU32(layout_.has_ppl ? 1 : 0);
  out.WriteU32(static_cast<uint32_t>(layout_.ivec_dim));
  out.WriteU32(static_cast<uint32_t>(layout_.xvec_dim));
  uint32_t dim = static_cast<uint32_t>(weights_.size());
  out.WriteU32(dim);
  for (uint32_t d = 0; d < dim; ++d) out.WriteF64(standardizer_mean_(d));
  for (uint32_t d = 0; d < dim; ++d) out.WriteF64(standardizer_scale_(d));
  for (uint32_t d = 0; d < dim; ++d) out.WriteF64(weights_(d));
  out.WriteF64(bias_);
  out.Close();
}

SvmModel SvmModel::Load(const std::string &path) {
  BinaryReader in(path, "SMSV", 1);
  SvmModel model;
  model.layout_.has_ppl = in.ReadU32() != 0;
  model.layout_.ivec_dim = static_cast<int>(in.ReadU32());
  model.layout_.xvec_dim = static_cast<int>(in.ReadU32());
  uint32_t dim = in.ReadU32();
  SM_REQUIRE(static_cast<int>(dim) == model.layout_.TotalDim(), IoError,
             "SVM layout does not match the stored dimension");
  model.standardizer_mean_.resize(dim);
  model.standardizer_scale_.resize(dim);
  model.weights_.resize(dim);
  for (uint32_t d = 0; d < dim; ++d) model.standardizer_mean_(d) = in.ReadF64();
  for (uint32_t d = 0; d < dim; ++d) model.standardizer_scale_(d) = in.ReadF64();
  for (uint32_t d = 0; d < dim; ++d) model.weights_(d) = in.ReadF64();
  model.bias_ = in.ReadF64();
  return model;
}

}  // namespace speechmark

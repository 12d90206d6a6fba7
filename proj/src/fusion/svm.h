// fusion/svm.h

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

#ifndef SPEECHMARK_FUSION_SVM_H_
#define SPEECHMARK_FUSION_SVM_H_

#include <string>
#include <vector>

#include "corpus/manifest.h"
#include "fusion/fusion.h"

namespace speechmark {

struct SvmOptions {
  double c = 1.0;        // soft-margin strength; the ridge weight is 1/c
  int max_epochs = 500;
  double eta0 = 0.5;
};

struct SvmPrediction {
  Label label = Label::kControl;  // a score of exactly 0 breaks to Control
  double score = 0.0;             // positive side is Dementia
};

// Linear soft-margin SVM on z-scored fusion vectors, trained by full-batch
// subgradient descent with step halving: a step is taken only when it does
// not increase the primal objective, so the recorded objective sequence is
// non-increasing and retraining on a duplicated dataset follows the exact
// same path.
class SvmModel {
 public:
  SvmModel() = default;

  static SvmModel Train(const std::vector<FusionVector> &examples,
                        const std::vector<Label> &labels,
                        const SvmOptions &opts = {});

  SvmPrediction Predict(const FusionVector &vector) const;

  const FusionLayout &layout() const { return layout_; }
  const Eigen::VectorXd &weights() const { return weights_; }
  double bias() const { return bias_; }
  // Primal objective after each accepted or rejected epoch; non-increasing.
  const std::vector<double> &objective_history() const { return objective_history_; }

  void Save(const std::string &path) const;
  static SvmModel Load(const std::string &path);

 private:
  FusionLayout layout_;
  Eigen::VectorXd standardizer_mean_;
  Eigen::VectorXd standardizer_scale_;
  Eigen::VectorXd weights_;
  double bias_ = 0.0;
  std::vector<double> objective_history_;
};

}  // namespace speechmark

#endif  // SPEECHMARK_FUSION_SVM_H_

// fusion/fusion.h

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

#ifndef SPEECHMARK_FUSION_FUSION_H_
#define SPEECHMARK_FUSION_FUSION_H_

#include <Eigen/Dense>
#include <string>

#include "ngram/ngram-model.h"

namespace speechmark {

// Which blocks a fused vector carries and how wide each one is.
struct FusionLayout {
  bool has_ppl = false;
  int ivec_dim = 0;  // 0 when absent
  int xvec_dim = 0;

  int TotalDim() const { return (has_ppl ? 2 : 0) + ivec_dim + xvec_dim; }
  bool operator==(const FusionLayout &other) const = default;
  std::string Describe() const;
};

// One case's fused representation: [log ppl_dementia, log ppl_control]
// then the i-vector, then the x-vector, in that fixed order.
struct FusionVector {
  Eigen::VectorXd values;
  FusionLayout layout;
};

// Absent blocks are passed as null.  At least one block must be present
// (ConfigError otherwise), and NaN inputs are rejected (InputError).
FusionVector Fuse(const PerplexityPair *ppl, const Eigen::VectorXd *ivec,
                  const Eigen::VectorXd *xvec);

}  // namespace speechmark

#endif  // SPEECHMARK_FUSION_FUSION_H_

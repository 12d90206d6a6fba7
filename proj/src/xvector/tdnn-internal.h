// xvector/tdnn-internal.h

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

#ifndef SPEECHMARK_XVECTOR_TDNN_INTERNAL_H_
#define SPEECHMARK_XVECTOR_TDNN_INTERNAL_H_

#include <Eigen/Dense>
#include <vector>

namespace speechmark {

class XvectorNet;

// All intermediate activations of one forward pass; kept so the training
// code can run backpropagation without recomputing anything.
struct TdnnTrace {
  void Run(const XvectorNet &net, const Eigen::MatrixXd &input);

  std::vector<Eigen::MatrixXd> frame_out;  // post-rectifier, per frame layer
  Eigen::VectorXd mean, stddev, pooled;
  Eigen::VectorXd seg6_pre, seg6, seg7_pre, seg7, logits, probabilities;
};

}  // namespace speechmark

#endif  // SPEECHMARK_XVECTOR_TDNN_INTERNAL_H_

// xvector/tdnn.h

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

#ifndef SPEECHMARK_XVECTOR_TDNN_H_
#define SPEECHMARK_XVECTOR_TDNN_H_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "frontend/mfcc.h"

namespace speechmark {

// Frame-layer widths, splice contexts and segment widths of the TDNN.
// The context pattern is fixed by the architecture: a contiguous [-4, 4]
// splice, then {-4, 0, 4}, {-5, 0, 5} and two single-frame layers.  Widths
// are free so tests can run a small net with the same wiring.
struct XvectorConfig {
  int feat_dim = 20;
  std::vector<int> frame_dims;             // output width per frame layer
  std::vector<std::vector<int>> contexts;  // sorted frame offsets per layer
  int seg6_dim = 8;
  int seg7_dim = 8;
  int n_classes = 2;

  // Full-size wiring (9F->128, ..., 128->7500, pooling to 15000,
  // segments 128/128).
  static XvectorConfig Full(int feat_dim, int n_classes);
  // Same wiring, small widths for desk-scale experiments and tests.
  static XvectorConfig Desk(int feat_dim, int n_classes);
  // Every context collapsed to {0}; pooled stats become order-free, which
  // the permutation tests rely on.
  static XvectorConfig ContextFree(int feat_dim, int n_classes);

  int NumFrameLayers() const { return static_cast<int>(frame_dims.size()); }
  int PrePoolDim() const { return frame_dims.back(); }
  int PooledDim() const { return 2 * PrePoolDim(); }
  // 1 + sum of (context span - 1) over frame layers; the minimum number of
  // input frames that yields one pooled frame.
  int ReceptiveField() const;
  // Splice width times previous layer width.
  int FrameLayerInputDim(int layer) const;
  void Validate() const;
};

struct AffineLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
};

struct XvectorForward {
  Eigen::VectorXd probabilities;  // n_classes, sums to 1
  Eigen::VectorXd embedding;      // seg6 affine output, pre-rectifier
};

// Feed-forward TDNN: frame layers over spliced contexts, mean+std pooling,
// two segment layers, softmax.  Layer order: frame layers, seg6, seg7,
// softmax.  Rectifier on all hidden layers.
class XvectorNet {
 public:
  XvectorNet() = default;

  // Hidden layers get seeded Gaussian fan-in init; the softmax layer starts
  // at zero, so an untrained net outputs the uniform distribution.
  static XvectorNet Initialize(const XvectorConfig &config, uint64_t seed);

  const XvectorConfig &config() const { return config_; }
  std::vector<AffineLayer> &layers() { return layers_; }
  const std::vector<AffineLayer> &layers() const { return layers_; }

  // Throws InputError when the input has fewer frames than the receptive
  // field.
  XvectorForward Forward(const FeatureMatrix &features) const;
  Eigen::VectorXd Embed(const FeatureMatrix &features) const;

  void Save(const std::string &path) const;
  static XvectorNet Load(const std::string &path);

 private:
  friend struct TdnnTrace;
  XvectorConfig config_;
  std::vector<AffineLayer> layers_;
};

// Mean and standard deviation per dimension over the rows of a matrix.
// Sums run in sorted order so the result does not depend on row order.
void PoolStatistics(const Eigen::MatrixXd &frames, Eigen::VectorXd *mean,
                    Eigen::VectorXd *stddev);

}  // namespace speechmark

#endif  // SPEECHMARK_XVECTOR_TDNN_H_

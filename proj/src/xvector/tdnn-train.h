// xvector/tdnn-train.h

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

#ifndef SPEECHMARK_XVECTOR_TDNN_TRAIN_H_
#define SPEECHMARK_XVECTOR_TDNN_TRAIN_H_

#include <vector>

#include "xvector/tdnn.h"

namespace speechmark {

// Non-owning view of one training case; features must outlive training.
struct XvectorExample {
  const FeatureMatrix *features = nullptr;
  int label = 0;
};

struct XvectorTrainOptions {
  int epochs = 10;
  int batch_size = 8;
  double learning_rate = 0.02;
  double momentum = 0.9;
  double lr_decay = 0.9;  // multiplicative step decay per epoch
  int chunk_min = 200;    // frames (2 s at a 10 ms shift)
  int chunk_max = 400;
  uint64_t seed = 1;
  bool augment = false;        // additive Gaussian feature noise
  double noise_snr_db = 20.0;  // chunk RMS over noise RMS
};

struct XvectorTrainResult {
  XvectorNet net;
  std::vector<double> epoch_loss;  // mean cross-entropy per epoch
};

// Cross-entropy and parameter gradients of one chunk, accumulated into
// *grads (which must match the net's layer shapes).  Returns the loss.
double XvectorLossGrad(const XvectorNet &net, const Eigen::MatrixXd &chunk,
                       int label, std::vector<AffineLayer> *grads);

std::vector<AffineLayer> ZeroLikeLayers(const XvectorNet &net);

// Minibatch SGD with momentum on randomly sampled chunks.  Every class in
// [0, n_classes) must be present in the dataset.
XvectorTrainResult TrainXvector(XvectorNet net,
                                const std::vector<XvectorExample> &dataset,
                                const XvectorTrainOptions &opts);

}  // namespace speechmark

#endif  // SPEECHMARK_XVECTOR_TDNN_TRAIN_H_

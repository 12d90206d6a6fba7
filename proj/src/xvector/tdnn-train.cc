// xvector/tdnn-train.cc

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

#include "xvector/tdnn-train.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "base/error.h"
#include "base/rng.h"
#include "xvector/tdnn-internal.h"

namespace speechmark {

std::vector<AffineLayer> ZeroLikeLayers(const XvectorNet &net) {
  std::vector<AffineLayer> grads;
  grads.reserve(net.layers().size());
  for (const auto &layer : net.layers()) {
    AffineLayer g;
    g.weight = Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols());
    g.bias = Eigen::VectorXd::Zero(layer.bias.size());
    grads.push_back(std::move(g));
  }
  return grads;
}

double XvectorLossGrad(const XvectorNet &net, const Eigen::MatrixXd &chunk,
                       int label, std::vector<AffineLayer> *grads) {
  const XvectorConfig &config = net.config();
  SM_REQUIRE(label >= 0 && label < config.n_classes, InputError,
             "label out of range");
  TdnnTrace trace;
  trace.Run(net, chunk);
  double loss = -std::log(std::max(trace.probabilities(label), 1e-300));

  int base = config.NumFrameLayers();
  const auto &layers = net.layers();

  // Softmax + segment layers.
  Eigen::VectorXd dlogits = trace.probabilities;
  dlogits(label) -= 1.0;
  (*grads)[base + 2].weight += dlogits * trace.seg7.transpose();
  (*grads)[base + 2].bias += dlogits;

  Eigen::VectorXd dseg7 = layers[base + 2].weight.transpose() * dlogits;
  Eigen::VectorXd dseg7_pre =
      (trace.seg7_pre.array() > 0.0).select(dseg7, 0.0);
  (*grads)[base + 1].weight += dseg7_pre * trace.seg6.transpose();
  (*grads)[base + 1].bias += dseg7_pre;

  Eigen::VectorXd dseg6 = layers[base + 1].weight.transpose() * dseg7_pre;
  Eigen::VectorXd dseg6_pre =
      (trace.seg6_pre.array() > 0.0).select(dseg6, 0.0);
  (*grads)[base].weight += dseg6_pre * trace.pooled.transpose();
  (*grads)[base].bias += dseg6_pre;

  // Statistics pooling: mean branch spreads evenly, std branch follows
  // (h - mu) / (T * std).
  Eigen::VectorXd dpooled = layers[base].weight.transpose() * dseg6_pre;
  int pre_pool = config.PrePoolDim();
  Eigen::VectorXd dmean = dpooled.head(pre_pool);
  Eigen::VectorXd dstd = dpooled.tail(pre_pool);
  const Eigen::MatrixXd &last_frames = trace.frame_out.back();
  long pooled_len = last_frames.rows();
  Eigen::MatrixXd dframes(pooled_len, pre_pool);
  for (long t = 0; t < pooled_len; ++t) {
    for (int d = 0; d < pre_pool; ++d) {
      double centered = last_frames(t, d) - trace.mean(d);
      dframes(t, d) = dmean(d) / pooled_len +
                      dstd(d) * centered / (pooled_len * trace.stddev(d));
    }
  }

  // Frame layers, top down.
  for (int l = config.NumFrameLayers() - 1; l >= 0; --l) {
    const auto &ctx = config.contexts[l];
    const Eigen::MatrixXd &out = trace.frame_out[l];
    const Eigen::MatrixXd &prev = (l == 0) ? chunk : trace.frame_out[l - 1];
    int prev_dim = static_cast<int>(prev.cols());
    Eigen::MatrixXd dprev = Eigen::MatrixXd::Zero(prev.rows(), prev_dim);
    Eigen::VectorXd spliced(config.FrameLayerInputDim(l));
    for (long t = 0; t < out.rows(); ++t) {
      Eigen::VectorXd dpre =
          (out.row(t).transpose().array() > 0.0)
              .select(dframes.row(t).transpose(), 0.0);
      for (size_t j = 0; j < ctx.size(); ++j) {
        long src = t + ctx[j] - ctx.front();
        spliced.segment(static_cast<long>(j) * prev_dim, prev_dim) =
            prev.row(src).transpose();
      }
      (*grads)[l].weight += dpre * spliced.transpose();
      (*grads)[l].bias += dpre;
      if (l > 0) {
        Eigen::VectorXd dspliced = net.layers()[l].weight.transpose() * dpre;
        for (size_t j = 0; j < ctx.size(); ++j) {
          long src = t + ctx[j] - ctx.front();
          dprev.row(src) +=
              dspliced.segment(static_cast<long>(j) * prev_dim, prev_dim).transpose();
        }
      }
    }
    dframes = std::move(dprev);
  }
  return loss;
}

XvectorTrainResult TrainXvector(XvectorNet net,
                                const std::vector<XvectorExample> &dataset,
                                const XvectorTrainOptions &opts) {
  const XvectorConfig &config = net.config();
  SM_REQUIRE(!dataset.empty(), TrainingError, "empty training set");
  std::set<int> present;
  int field = config.ReceptiveField();
  for (size_t i = 0; i < dataset.size(); ++i) {
    const auto &ex = dataset[i];
    SM_REQUIRE(ex.features != nullptr, InputError, "null feature pointer");
    SM_REQUIRE(ex.label >= 0 && ex.label < config.n_classes, InputError,
               "label out of range");
    SM_REQUIRE(ex.features->NumFrames() >= field, InputError,
               "recording " + std::to_string(i) +
                   " is shorter than the receptive field");
    present.insert(ex.label);
  }
  SM_REQUIRE(static_cast<int>(present.size()) == config.n_classes, TrainingError,
             "every class must appear in the training set");
  SM_REQUIRE(opts.chunk_min >= field && opts.chunk_max >= opts.chunk_min,
             ConfigError, "chunk range must be within [receptive field, ...]");

  Rng rng(opts.seed);
  std::vector<AffineLayer> velocity = ZeroLikeLayers(net);
  std::vector<size_t> order(dataset.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  XvectorTrainResult result;
  result.epoch_loss.reserve(opts.epochs);
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    double lr = opts.learning_rate * std::pow(opts.lr_decay, epoch);
    rng.Shuffle(&order);
    double epoch_loss = 0.0;
    size_t seen = 0;
    for (size_t begin = 0; begin < order.size(); begin += opts.batch_size) {
      size_t end = std::min(order.size(), begin + opts.batch_size);
      std::vector<AffineLayer> grads = ZeroLikeLayers(net);
      for (size_t i = begin; i < end; ++i) {
        const auto &ex = dataset[order[i]];
        long frames = ex.features->NumFrames();
        long want = opts.chunk_min +
                    static_cast<long>(rng.UniformInt(opts.chunk_max - opts.chunk_min + 1));
        long len = std::min<long>(frames, want);
        long start = (frames == len) ? 0
                                     : static_cast<long>(rng.UniformInt(frames - len + 1));
        Eigen::MatrixXd chunk = ex.features->frames.middleRows(start, len);
        if (opts.augment) {
          double rms = std::sqrt(chunk.array().square().mean());
          double noise_std = rms * std::pow(10.0, -opts.noise_snr_db / 20.0);
          for (long r = 0; r < chunk.rows(); ++r)
            for (long ccol = 0; ccol < chunk.cols(); ++ccol)
              chunk(r, ccol) += noise_std * rng.Gaussian();
        }
        epoch_loss += XvectorLossGrad(net, chunk, ex.label, &grads);
        ++seen;
      }
      double scale = lr / static_cast<double>(end - begin);
      for (size_t l = 0; l < net.layers().size(); ++l) {
        velocity[l].weight = opts.momentum * velocity[l].weight - scale * grads[l].weight;
        velocity[l].bias = opts.momentum * velocity[l].bias - scale * grads[l].bias;
        net.layers()[l].weight += velocity[l].weight;
        net.layers()[l].bias += velocity[l].bias;
      }
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(seen));
  }
  result.net = std::move(net);
  return result;
}

}  // namespace speechmark

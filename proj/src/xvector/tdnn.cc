// xvector/tdnn.cc

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

#include "xvector/tdnn.h"

#include <algorithm>
#include <cmath>

#include "base/error.h"
#include "base/io.h"
#include "base/rng.h"
#include "xvector/tdnn-internal.h"

namespace speechmark {

namespace {

std::vector<int> Range(int lo, int hi) {
  std::vector<int> out;
  for (int i = lo; i <= hi; ++i) out.push_back(i);
  return out;
}

std::vector<std::vector<int>> StandardContexts() {
  return {Range(-4, 4), {-4, 0, 4}, {-5, 0, 5}, {0}, {0}};
}

}  // namespace

XvectorConfig XvectorConfig::Full(int feat_dim, int n_classes) {
  XvectorConfig c;
  c.feat_dim = feat_dim;
  c.frame_dims = {128, 128, 128, 128, 7500};
  c.contexts = StandardContexts();
  c.seg6_dim = 128;
  c.seg7_dim = 128;
  c.n_classes = n_classes;
  return c;
}

XvectorConfig XvectorConfig::Desk(int feat_dim, int n_classes) {
  XvectorConfig c;
  c.feat_dim = feat_dim;
  c.frame_dims = {16, 16, 16, 16, 64};
  c.contexts = StandardContexts();
  c.seg6_dim = 8;
  c.seg7_dim = 8;
  c.n_classes = n_classes;
  return c;
}

XvectorConfig XvectorConfig::ContextFree(int feat_dim, int n_classes) {
  XvectorConfig c = Desk(feat_dim, n_classes);
  for (auto &ctx : c.contexts) ctx = {0};
  return c;
}

int XvectorConfig::ReceptiveField() const {
  int field = 1;
  for (const auto &ctx : contexts) field += ctx.back() - ctx.front();
  return field;
}

int XvectorConfig::FrameLayerInputDim(int layer) const {
  int prev = (layer == 0) ? feat_dim : frame_dims[layer - 1];
  return static_cast<int>(contexts[layer].size()) * prev;
}

void XvectorConfig::Validate() const {
  SM_REQUIRE(feat_dim > 0, ConfigError, "feature dimension must be positive");
  SM_REQUIRE(!frame_dims.empty(), ConfigError, "no frame layers configured");
  SM_REQUIRE(frame_dims.size() == contexts.size(), ConfigError,
             "one context set per frame layer required");
  for (const auto &ctx : contexts) {
    SM_REQUIRE(!ctx.empty(), ConfigError, "empty splice context");
    SM_REQUIRE(std::is_sorted(ctx.begin(), ctx.end()), ConfigError,
               "splice offsets must be sorted");
  }
  for (int d : frame_dims)
    SM_REQUIRE(d > 0, ConfigError, "frame layer width must be positive");
  SM_REQUIRE(seg6_dim > 0 && seg7_dim > 0, ConfigError,
             "segment widths must be positive");
  SM_REQUIRE(n_classes >= 2, ConfigError, "need at least two classes");
}

XvectorNet XvectorNet::Initialize(const XvectorConfig &config, uint64_t seed) {
  config.Validate();
  XvectorNet net;
  net.config_ = config;
  Rng rng(seed);
  auto gaussian_layer = [&rng](int out, int in) {
    AffineLayer layer;
    layer.weight.resize(out, in);
    double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) layer.weight(r, c) = scale * rng.Gaussian();
    layer.bias = Eigen::VectorXd::Zero(out);
    return layer;
  };
  for (int l = 0; l < config.NumFrameLayers(); ++l)
    net.layers_.push_back(gaussian_layer(config.frame_dims[l], config.FrameLayerInputDim(l)));
  net.layers_.push_back(gaussian_layer(config.seg6_dim, config.PooledDim()));
  net.layers_.push_back(gaussian_layer(config.seg7_dim, config.seg6_dim));
  AffineLayer softmax_layer;
  softmax_layer.weight = Eigen::MatrixXd::Zero(config.n_classes, config.seg7_dim);
  softmax_layer.bias = Eigen::VectorXd::Zero(config.n_classes);
  net.layers_.push_back(std::move(softmax_layer));
  return net;
}

void PoolStatistics(const Eigen::MatrixXd &frames, Eigen::VectorXd *mean,
                    Eigen::VectorXd *stddev) {
  long rows = frames.rows();
  int dims = static_cast<int>(frames.cols());
  mean->resize(dims);
  stddev->resize(dims);
  std::vector<double> column(rows);
  for (int d = 0; d < dims; ++d) {
    for (long t = 0; t < rows; ++t) column[t] = frames(t, d);
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;
    double mu = sum / rows;
    double sq = 0.0;
    for (double v : column) sq += (v - mu) * (v - mu);
    (*mean)(d) = mu;
    (*stddev)(d) = std::sqrt(sq / rows + 1e-10);
  }
}

void TdnnTrace::Run(const XvectorNet &net, const Eigen::MatrixXd &input) {
  const XvectorConfig &config = net.config();
  SM_REQUIRE(static_cast<int>(input.cols()) == config.feat_dim, InputError,
             "feature dimension does not match the net");
  SM_REQUIRE(input.rows() >= config.ReceptiveField(), InputError,
             "input shorter than the receptive field (" +
                 std::to_string(config.ReceptiveField()) + " frames)");

  frame_out.assign(config.NumFrameLayers(), Eigen::MatrixXd());
  const Eigen::MatrixXd *prev = &input;
  for (int l = 0; l < config.NumFrameLayers(); ++l) {
    const auto &ctx = config.contexts[l];
    int span = ctx.back() - ctx.front() + 1;
    long out_len = prev->rows() - span + 1;
    const AffineLayer &layer = net.layers()[l];
    Eigen::MatrixXd out(out_len, config.frame_dims[l]);
    Eigen::VectorXd spliced(config.FrameLayerInputDim(l));
    int prev_dim = static_cast<int>(prev->cols());
    for (long t = 0; t < out_len; ++t) {
      for (size_t j = 0; j < ctx.size(); ++j) {
        long src = t + ctx[j] - ctx.front();
        spliced.segment(static_cast<long>(j) * prev_dim, prev_dim) =
            prev->row(src).transpose();
      }
      out.row(t) =
          ((layer.weight * spliced + layer.bias).array().max(0.0)).transpose();
    }
    frame_out[l] = std::move(out);
    prev = &frame_out[l];
  }

  PoolStatistics(*prev, &mean, &stddev);
  pooled.resize(config.PooledDim());
  pooled << mean, stddev;

  const auto &net_layers = net.layers();
  int base = config.NumFrameLayers();
  seg6_pre = net_layers[base].weight * pooled + net_layers[base].bias;
  seg6 = seg6_pre.array().max(0.0);
  seg7_pre = net_layers[base + 1].weight * seg6 + net_layers[base + 1].bias;
  seg7 = seg7_pre.array().max(0.0);
  logits = net_layers[base + 2].weight * seg7 + net_layers[base + 2].bias;
  double max_logit = logits.maxCoeff();
  Eigen::VectorXd shifted = (logits.array() - max_logit).exp();
  probabilities = shifted / shifted.sum();
}

XvectorForward XvectorNet::Forward(const FeatureMatrix &features) const {
  TdnnTrace trace;
  trace.Run(*this, features.frames);
  XvectorForward out;
  out.probabilities = std::move(trace.probabilities);
  out.embedding = std::move(trace.seg6_pre);
  return out;
}

Eigen::VectorXd XvectorNet::Embed(const FeatureMatrix &features) const {
  return Forward(features).embedding;
}

void XvectorNet::Save(const std::string &path) const {
  BinaryWriter out(path, "SMXV", 1);
  out.WriteU32(static_cast<uint32_t>(config_.feat_dim));
  out.WriteU32(static_cast<uint32_t>(config_.NumFrameLayers()));
  for (int d : config_.frame_dims) out.WriteU32(static_cast<uint32_t>(d));
  for (const auto &ctx : config_.contexts) {
    out.WriteU32(static_cast<uint32_t>(ctx.size()));
    for (int o : ctx) out.WriteU32(static_cast<uint32_t>(static_cast<int32_t>(o)));
  }
  out.WriteU32(static_cast<uint32_t>(config_.seg6_dim));
  out.WriteU32(static_cast<uint32_t>(config_.seg7_dim));
  out.WriteU32(static_cast<uint32_t>(config_.n_classes));
  for (const auto &layer : layers_) {
    out.WriteU32(static_cast<uint32_t>(layer.weight.rows()));
    out.WriteU32(static_cast<uint32_t>(layer.weight.cols()));
    for (long r = 0; r < layer.weight.rows(); ++r)
      for (long c = 0; c < layer.weight.cols(); ++c) out.WriteF64(layer.weight(r, c));
    for (long r = 0; r < layer.bias.size(); ++r) out.WriteF64(layer.bias(r));
  }
  out.Close();
}

XvectorNet XvectorNet::Load(const std::string &path) {
  BinaryReader in(path, "SMXV", 1);
  XvectorConfig config;
  config.feat_dim = static_cast<int>(in.ReadU32());
  uint32_t n_frame_layers = in.ReadU32();
  config.frame_dims.resize(n_frame_layers);
  for (auto &d : config.frame_dims) d = static_cast<int>(in.ReadU32());
  config.contexts.resize(n_frame_layers);
  for (auto &ctx : config.contexts) {
    uint32_t n = in.ReadU32();
    ctx.resize(n);
    for (auto &o : ctx) o = static_cast<int32_t>(in.ReadU32());
  }
  config.seg6_dim = static_cast<int>(in.ReadU32());
  config.seg7_dim = static_cast<int>(in.ReadU32());
  config.n_classes = static_cast<int>(in.ReadU32());
  config.Validate();

  XvectorNet net;
  net.config_ = config;
  size_t n_layers = n_frame_layers + 3;
  for (size_t l = 0; l < n_layers; ++l) {
    AffineLayer layer;
    uint32_t rows = in.ReadU32();
    uint32_t cols = in.ReadU32();
    layer.weight.resize(rows, cols);
    for (uint32_t r = 0; r < rows; ++r)
      for (uint32_t c = 0; c < cols; ++c) layer.weight(r, c) = in.ReadF64();
    layer.bias.resize(rows);
    for (uint32_t r = 0; r < rows; ++r) layer.bias(r) = in.ReadF64();
    net.layers_.push_back(std::move(layer));
  }
  return net;
}

}  // namespace speechmark

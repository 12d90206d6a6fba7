// tests/xvector-test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "base/error.h"
#include "base/rng.h"
#include "testutil.h"
#include "xvector/tdnn-train.h"
#include "xvector/tdnn.h"

using namespace speechmark;
using speechmark::testing::TempDir;

namespace {

FeatureMatrix RandomFeatures(int frames, int dim, uint64_t seed, double shift = 0.0) {
  Rng rng(seed);
  FeatureMatrix out;
  out.frames.resize(frames, dim);
  for (int t = 0; t < frames; ++t)
    for (int d = 0; d < dim; ++d) out.frames(t, d) = rng.Gaussian() + shift;
  return out;
}

XvectorConfig TinyConfig(int feat_dim) {
  XvectorConfig config = XvectorConfig::Desk(feat_dim, 2);
  config.frame_dims = {5, 5, 5, 5, 6};
  config.seg6_dim = 4;
  config.seg7_dim = 4;
  return config;
}

}  // namespace

TEST_CASE("config: full-size wiring chains dimension by dimension") {
  XvectorConfig config = XvectorConfig::Full(20, 2);
  CHECK(config.FrameLayerInputDim(0) == 9 * 20);   // contiguous 9-frame splice
  CHECK(config.FrameLayerInputDim(1) == 3 * 128);  // {t-4, t, t+4}
  CHECK(config.FrameLayerInputDim(2) == 3 * 128);  // {t-5, t, t+5}
  CHECK(config.FrameLayerInputDim(3) == 128);
  CHECK(config.FrameLayerInputDim(4) == 128);
  CHECK(config.PrePoolDim() == 7500);
  CHECK(config.PooledDim() == 15000);
  CHECK(config.seg6_dim == 128);
  // The three spliced layers span 9 + 9 + 11 frames, so one pooled frame
  // sees 27 input frames.
  CHECK(config.ReceptiveField() == 27);
}

TEST_CASE("config: the full-size preset builds and runs forward") {
  XvectorConfig config = XvectorConfig::Full(20, 2);
  XvectorNet net = XvectorNet::Initialize(config, 3);
  FeatureMatrix features = RandomFeatures(30, 20, 4);
  XvectorForward out = net.Forward(features);
  CHECK(out.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(out.embedding.size() == 128);
}

TEST_CASE("config: validation rejects malformed wiring") {
  XvectorConfig config = XvectorConfig::Desk(10, 2);
  config.contexts[1] = {4, 0, -4};  // unsorted
  CHECK_THROWS_AS(config.Validate(), ConfigError);
  config = XvectorConfig::Desk(10, 2);
  config.frame_dims = {8, 8};  // context list no longer matches
  CHECK_THROWS_AS(config.Validate(), ConfigError);
  config = XvectorConfig::Desk(10, 1);
  CHECK_THROWS_AS(config.Validate(), ConfigError);
}

TEST_CASE("forward: desk net emits a simplex and an 8-wide embedding") {
  XvectorConfig config = XvectorConfig::Desk(12, 2);
  XvectorNet net = XvectorNet::Initialize(config, 5);
  FeatureMatrix features = RandomFeatures(60, 12, 6);
  XvectorForward out = net.Forward(features);
  REQUIRE(out.probabilities.size() == 2);
  CHECK(out.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK((out.probabilities.array() >= 0.0).all());
  CHECK(out.embedding.size() == 8);
  CHECK(out.embedding.allFinite());
}

TEST_CASE("forward: input at the receptive field works, one frame less fails") {
  XvectorConfig config = XvectorConfig::Desk(6, 2);
  XvectorNet net = XvectorNet::Initialize(config, 7);
  CHECK_NOTHROW(net.Forward(RandomFeatures(27, 6, 8)));
  CHECK_THROWS_AS(net.Forward(RandomFeatures(26, 6, 9)), InputError);
}

TEST_CASE("pooling: constant input pools to the frame itself with (near) zero std") {
  Eigen::MatrixXd frames = Eigen::MatrixXd::Ones(40, 5) * 2.5;
  Eigen::VectorXd mean, stddev;
  PoolStatistics(frames, &mean, &stddev);
  for (int d = 0; d < 5; ++d) {
    CHECK(mean(d) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(stddev(d) <= 1e-4);  // epsilon-floored square root of zero variance
  }
}

TEST_CASE("pooling: bitwise invariant under frame permutation") {
  Rng rng(11);
  Eigen::MatrixXd frames(31, 7);
  for (int t = 0; t < 31; ++t)
    for (int d = 0; d < 7; ++d) frames(t, d) = rng.Gaussian();
  Eigen::MatrixXd reversed = frames.colwise().reverse();
  std::vector<size_t> perm = rng.SampleWithoutReplacement(31, 31);
  Eigen::MatrixXd shuffled(31, 7);
  for (int t = 0; t < 31; ++t) shuffled.row(t) = frames.row(perm[t]);

  Eigen::VectorXd mean_a, std_a, mean_b, std_b, mean_c, std_c;
  PoolStatistics(frames, &mean_a, &std_a);
  PoolStatistics(reversed, &mean_b, &std_b);
  PoolStatistics(shuffled, &mean_c, &std_c);
  CHECK((mean_a - mean_b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((std_a - std_b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((mean_a - mean_c).cwiseAbs().maxCoeff() == 0.0);
  CHECK((std_a - std_c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward: context-free variant is exactly permutation invariant") {
  XvectorConfig config = XvectorConfig::ContextFree(9, 2);
  XvectorNet net = XvectorNet::Initialize(config, 13);
  FeatureMatrix features = RandomFeatures(35, 9, 14);
  FeatureMatrix permuted = features;
  Rng rng(15);
  std::vector<size_t> perm = rng.SampleWithoutReplacement(35, 35);
  for (int t = 0; t < 35; ++t) permuted.frames.row(t) = features.frames.row(perm[t]);
  Eigen::VectorXd a = net.Embed(features);
  Eigen::VectorXd b = net.Embed(permuted);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward: constant input pools the same regardless of length") {
  // Every valid position sees the same spliced window, so the pooled mean
  // is that one frame-stack output and the std branch sits at its floor;
  // lengthening the constant input cannot change the embedding.
  XvectorConfig config = XvectorConfig::Desk(5, 2);
  XvectorNet net = XvectorNet::Initialize(config, 16);
  FeatureMatrix brief, extended;
  brief.frames = Eigen::MatrixXd::Constant(27, 5, 0.8);
  extended.frames = Eigen::MatrixXd::Constant(47, 5, 0.8);
  Eigen::VectorXd a = net.Embed(brief);
  Eigen::VectorXd b = net.Embed(extended);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("forward: identical input gives identical embeddings") {
  XvectorConfig config = XvectorConfig::Desk(10, 2);
  XvectorNet net = XvectorNet::Initialize(config, 17);
  FeatureMatrix features = RandomFeatures(50, 10, 18);
  Eigen::VectorXd a = net.Embed(features);
  Eigen::VectorXd b = net.Embed(features);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("init: zero softmax layer gives the uniform loss exactly") {
  XvectorConfig config = XvectorConfig::Desk(8, 2);
  XvectorNet net = XvectorNet::Initialize(config, 19);
  FeatureMatrix features = RandomFeatures(40, 8, 20);
  XvectorForward out = net.Forward(features);
  CHECK(out.probabilities(0) == doctest::Approx(0.5).epsilon(1e-12));
  std::vector<AffineLayer> grads = ZeroLikeLayers(net);
  double loss = XvectorLossGrad(net, features.frames, 1, &grads);
  CHECK(loss == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("forward: class count is free, initial loss is ln L") {
  XvectorConfig config = XvectorConfig::Desk(5, 3);
  XvectorNet net = XvectorNet::Initialize(config, 21);
  FeatureMatrix features = RandomFeatures(40, 5, 22);
  XvectorForward out = net.Forward(features);
  REQUIRE(out.probabilities.size() == 3);
  CHECK(out.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-8));
  std::vector<AffineLayer> grads = ZeroLikeLayers(net);
  double loss = XvectorLossGrad(net, features.frames, 2, &grads);
  CHECK(loss == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("gradients: every parameter matches central finite differences") {
  XvectorConfig config = TinyConfig(4);
  XvectorNet net = XvectorNet::Initialize(config, 23);
  FeatureMatrix features = RandomFeatures(31, 4, 24);
  int label = 1;

  // Give the zero-initialized softmax layer nonzero weights so its inputs
  // see real gradient flow.
  {
    Rng rng(25);
    AffineLayer &last = net.layers().back();
    for (long r = 0; r < last.weight.rows(); ++r) {
      for (long c = 0; c < last.weight.cols(); ++c)
        last.weight(r, c) = 0.5 * rng.Gaussian();
      last.bias(r) = 0.1 * rng.Gaussian();
    }
  }

  std::vector<AffineLayer> grads = ZeroLikeLayers(net);
  XvectorLossGrad(net, features.frames, label, &grads);

  const double eps = 1e-5;
  auto loss_at = [&]() {
    std::vector<AffineLayer> scratch = ZeroLikeLayers(net);
    return XvectorLossGrad(net, features.frames, label, &scratch);
  };
  int checked = 0;
  for (size_t l = 0; l < net.layers().size(); ++l) {
    AffineLayer &layer = net.layers()[l];
    for (long r = 0; r < layer.weight.rows(); ++r) {
      for (long c = 0; c < layer.weight.cols(); ++c) {
        double saved = layer.weight(r, c);
        layer.weight(r, c) = saved + eps;
        double up = loss_at();
        layer.weight(r, c) = saved - eps;
        double down = loss_at();
        layer.weight(r, c) = saved;
        double fd = (up - down) / (2.0 * eps);
        double analytic = grads[l].weight(r, c);
        double rel = std::abs(analytic - fd) /
                     std::max(1e-8, std::abs(analytic) + std::abs(fd));
        CHECK(rel <= 1e-4);
        ++checked;
      }
    }
    for (long r = 0; r < layer.bias.size(); ++r) {
      double saved = layer.bias(r);
      layer.bias(r) = saved + eps;
      double up = loss_at();
      layer.bias(r) = saved - eps;
      double down = loss_at();
      layer.bias(r) = saved;
      double fd = (up - down) / (2.0 * eps);
      double analytic = grads[l].bias(r);
      double rel = std::abs(analytic - fd) /
                   std::max(1e-8, std::abs(analytic) + std::abs(fd));
      CHECK(rel <= 1e-4);
      ++checked;
    }
  }
  CHECK(checked > 400);  // the whole parameter vector was exercised
}

TEST_CASE("training: separable synthetic classes reach 95 percent") {
  // Class 0 frames sit around +1.5, class 1 around -1.5.
  std::vector<FeatureMatrix> bank;
  for (int i = 0; i < 20; ++i) bank.push_back(RandomFeatures(60, 6, 300 + i, 1.5));
  for (int i = 0; i < 20; ++i) bank.push_back(RandomFeatures(60, 6, 400 + i, -1.5));
  std::vector<XvectorExample> dataset;
  for (int i = 0; i < 40; ++i) dataset.push_back({&bank[i], i < 20 ? 0 : 1});

  XvectorConfig config = XvectorConfig::Desk(6, 2);
  XvectorNet net = XvectorNet::Initialize(config, 27);
  XvectorTrainOptions opts;
  opts.epochs = 30;
  opts.chunk_min = 30;
  opts.chunk_max = 50;
  opts.learning_rate = 0.05;
  opts.seed = 28;
  XvectorTrainResult result = TrainXvector(std::move(net), dataset, opts);

  CHECK(result.epoch_loss.back() < result.epoch_loss.front());
  int correct = 0;
  for (const auto &ex : dataset) {
    XvectorForward out = result.net.Forward(*ex.features);
    int predicted = out.probabilities(0) >= out.probabilities(1) ? 0 : 1;
    if (predicted == ex.label) ++correct;
  }
  CHECK(correct >= 38);  // 95% of 40
}

TEST_CASE("training: augmentation noise keeps learning on the same task") {
  std::vector<FeatureMatrix> bank;
  for (int i = 0; i < 10; ++i) bank.push_back(RandomFeatures(60, 5, 500 + i, 1.5));
  for (int i = 0; i < 10; ++i) bank.push_back(RandomFeatures(60, 5, 600 + i, -1.5));
  std::vector<XvectorExample> dataset;
  for (int i = 0; i < 20; ++i) dataset.push_back({&bank[i], i < 10 ? 0 : 1});
  XvectorConfig config = XvectorConfig::Desk(5, 2);
  XvectorTrainOptions opts;
  opts.epochs = 10;
  opts.chunk_min = 30;
  opts.chunk_max = 40;
  opts.augment = true;
  opts.noise_snr_db = 10.0;
  XvectorTrainResult result =
      TrainXvector(XvectorNet::Initialize(config, 29), dataset, opts);
  CHECK(result.epoch_loss.back() < std::log(2.0));
}

TEST_CASE("training: preconditions") {
  std::vector<FeatureMatrix> bank = {RandomFeatures(60, 5, 700),
                                     RandomFeatures(60, 5, 701)};
  XvectorConfig config = XvectorConfig::Desk(5, 2);
  XvectorTrainOptions opts;
  opts.chunk_min = 30;
  opts.chunk_max = 40;

  std::vector<XvectorExample> single = {{&bank[0], 0}, {&bank[1], 0}};
  CHECK_THROWS_AS(
      TrainXvector(XvectorNet::Initialize(config, 1), single, opts), TrainingError);

  FeatureMatrix brief = RandomFeatures(20, 5, 702);  // below the receptive field
  std::vector<XvectorExample> with_short = {{&bank[0], 0}, {&brief, 1}};
  CHECK_THROWS_AS(
      TrainXvector(XvectorNet::Initialize(config, 1), with_short, opts), InputError);

  std::vector<XvectorExample> bad_label = {{&bank[0], 0}, {&bank[1], 2}};
  CHECK_THROWS_AS(
      TrainXvector(XvectorNet::Initialize(config, 1), bad_label, opts), InputError);
}

TEST_CASE("model file: reload reproduces forward outputs bitwise") {
  TempDir dir("xvec_io");
  XvectorConfig config = XvectorConfig::Desk(7, 2);
  XvectorNet net = XvectorNet::Initialize(config, 31);
  std::string path = dir.File("net.bin");
  net.Save(path);
  XvectorNet loaded = XvectorNet::Load(path);
  FeatureMatrix features = RandomFeatures(45, 7, 32);
  XvectorForward a = net.Forward(features);
  XvectorForward b = loaded.Forward(features);
  CHECK((a.probabilities - b.probabilities).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.embedding - b.embedding).cwiseAbs().maxCoeff() == 0.0);
}

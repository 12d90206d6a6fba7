// tests/frontend-test.cc

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
#include <complex>
#include <vector>

#include "base/error.h"
#include "base/rng.h"
#include "frontend/feature-cache.h"
#include "frontend/mfcc.h"
#include "testutil.h"

using namespace speechmark;
using speechmark::testing::TempDir;

namespace {

AudioSignal RandomSignal(size_t n, uint64_t seed, int rate = 16000) {
  Rng rng(seed);
  AudioSignal signal;
  signal.sample_rate = rate;
  signal.samples.resize(n);
  for (auto &s : signal.samples) s = rng.UniformDouble(-0.5, 0.5);
  return signal;
}

// Independent frame pipeline built from the definitions: naive O(N^2) DFT,
// triangular mel filters, orthonormal DCT-II.  Mirrors the production
// conventions (pre-emphasis with a scaled first sample, Hamming window,
// zero padding to the next power of two, filters from 20 Hz to Nyquist).
std::vector<double> OracleFrame(const std::vector<double> &frame_samples,
                                const FrontendConfig &config, int sample_rate,
                                double *sum_log_mel_out = nullptr) {
  size_t window = frame_samples.size();
  std::vector<double> windowed(window);
  for (size_t i = 0; i < window; ++i) {
    double emphasized = (i == 0)
                            ? frame_samples[0] * (1.0 - config.preemphasis)
                            : frame_samples[i] - config.preemphasis * frame_samples[i - 1];
    double hamming = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (window - 1));
    windowed[i] = emphasized * hamming;
  }
  size_t n_fft = 1;
  while (n_fft < window) n_fft <<= 1;
  size_t n_bins = n_fft / 2 + 1;
  std::vector<double> power(n_bins);
  for (size_t k = 0; k < n_bins; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (size_t i = 0; i < window; ++i) {
      double angle = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(i) /
                     static_cast<double>(n_fft);
      acc += windowed[i] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    power[k] = std::norm(acc);
  }
  auto hz_to_mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto mel_to_hz = [](double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); };
  double low = hz_to_mel(20.0), high = hz_to_mel(sample_rate / 2.0);
  std::vector<double> centers(config.num_filters + 2);
  for (int i = 0; i < config.num_filters + 2; ++i)
    centers[i] = mel_to_hz(low + (high - low) * i / (config.num_filters + 1)) *
                 static_cast<double>(n_fft) / sample_rate;
  std::vector<double> log_mel(config.num_filters);
  double sum_log_mel = 0.0;
  for (int m = 0; m < config.num_filters; ++m) {
    double acc = 0.0;
    for (size_t bin = 0; bin < n_bins; ++bin) {
      double b = static_cast<double>(bin);
      double weight = 0.0;
      if (b > centers[m] && b < centers[m + 1])
        weight = (b - centers[m]) / (centers[m + 1] - centers[m]);
      else if (b >= centers[m + 1] && b < centers[m + 2])
        weight = (centers[m + 2] - b) / (centers[m + 2] - centers[m + 1]);
      acc += weight * power[bin];
    }
    log_mel[m] = std::log(std::max(acc, config.log_floor));
    sum_log_mel += log_mel[m];
  }
  if (sum_log_mel_out != nullptr) *sum_log_mel_out = sum_log_mel;
  std::vector<double> coeffs(config.num_coeffs);
  for (int k = 0; k < config.num_coeffs; ++k) {
    double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / config.num_filters);
    double acc = 0.0;
    for (int m = 0; m < config.num_filters; ++m)
      acc += log_mel[m] * std::cos(M_PI * k * (m + 0.5) / config.num_filters);
    coeffs[k] = scale * acc;
  }
  return coeffs;
}

}  // namespace

TEST_CASE("mfcc: one second at 16 kHz gives 98 frames") {
  AudioSignal signal = RandomSignal(16000, 1);
  FeatureMatrix features = ExtractMfcc(signal, FrontendConfig{});
  CHECK(features.NumFrames() == 98);
  CHECK(features.Dim() == 20);
}

TEST_CASE("mfcc: silence produces identical frames") {
  AudioSignal signal;
  signal.sample_rate = 16000;
  signal.samples.assign(8000, 0.0);
  FeatureMatrix features = ExtractMfcc(signal, FrontendConfig{});
  REQUIRE(features.NumFrames() > 1);
  for (int t = 1; t < features.NumFrames(); ++t)
    CHECK((features.frames.row(t) - features.frames.row(0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mfcc: frames match the direct DFT oracle") {
  FrontendConfig config;
  AudioSignal signal = RandomSignal(16000, 42);
  FeatureMatrix features = ExtractMfcc(signal, config);
  size_t window = 400, shift = 160;
  Rng rng(7);
  for (int check = 0; check < 3; ++check) {
    size_t t = rng.UniformInt(features.NumFrames());
    std::vector<double> frame(signal.samples.begin() + t * shift,
                              signal.samples.begin() + t * shift + window);
    double sum_log_mel = 0.0;
    std::vector<double> expected = OracleFrame(frame, config, 16000, &sum_log_mel);
    for (int d = 0; d < features.Dim(); ++d)
      CHECK(features.frames(t, d) == doctest::Approx(expected[d]).epsilon(1e-8));
    // c0 is the orthonormal-DCT image of the total log mel energy.
    CHECK(features.frames(t, 0) ==
          doctest::Approx(std::sqrt(1.0 / config.num_filters) * sum_log_mel).epsilon(1e-8));
  }
}

TEST_CASE("mfcc: scaling the waveform moves only c0") {
  FrontendConfig config;
  AudioSignal signal = RandomSignal(8000, 9);
  AudioSignal scaled = signal;
  for (auto &s : scaled.samples) s *= 3.7;
  FeatureMatrix a = ExtractMfcc(signal, config);
  FeatureMatrix b = ExtractMfcc(scaled, config);
  REQUIRE(a.NumFrames() == b.NumFrames());
  for (int t = 0; t < a.NumFrames(); ++t) {
    CHECK(std::abs(b.frames(t, 0) - a.frames(t, 0)) > 1e-3);
    for (int d = 1; d < a.Dim(); ++d)
      CHECK(std::abs(b.frames(t, d) - a.frames(t, d)) < 1e-6);
  }
}

TEST_CASE("mfcc: trailing silence shorter than a shift adds at most one frame") {
  FrontendConfig config;
  AudioSignal signal = RandomSignal(8000, 11);
  AudioSignal padded = signal;
  padded.samples.resize(signal.samples.size() + 100, 0.0);  // < 160 samples
  FeatureMatrix a = ExtractMfcc(signal, config);
  FeatureMatrix b = ExtractMfcc(padded, config);
  CHECK(b.NumFrames() - a.NumFrames() <= 1);
  CHECK(b.NumFrames() >= a.NumFrames());
  for (int t = 0; t < a.NumFrames(); ++t)
    CHECK((a.frames.row(t) - b.frames.row(t)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mfcc: too-short audio is an input error") {
  AudioSignal signal = RandomSignal(399, 3);
  CHECK_THROWS_AS(ExtractMfcc(signal, FrontendConfig{}), InputError);
}

TEST_CASE("mfcc: energy gate drops quiet frames") {
  FrontendConfig config;
  config.vad = true;
  AudioSignal signal;
  signal.sample_rate = 16000;
  signal.samples.assign(16000, 0.0);
  Rng rng(13);
  // loud middle second-half
  for (size_t i = 8000; i < 16000; ++i) signal.samples[i] = rng.UniformDouble(-0.5, 0.5);
  FeatureMatrix gated = ExtractMfcc(signal, config);
  config.vad = false;
  FeatureMatrix full = ExtractMfcc(signal, config);
  CHECK(gated.NumFrames() < full.NumFrames());
  CHECK(gated.NumFrames() > 0);
}

TEST_CASE("cmvn: constant column becomes zeros, not NaN") {
  FeatureMatrix features;
  features.frames.resize(10, 3);
  Rng rng(17);
  for (int t = 0; t < 10; ++t) {
    features.frames(t, 0) = 5.0;  // constant
    features.frames(t, 1) = rng.UniformDouble(-1, 1);
    features.frames(t, 2) = rng.Gaussian();
  }
  FeatureMatrix out = Cmvn(features);
  for (int t = 0; t < 10; ++t) CHECK(out.frames(t, 0) == 0.0);
  CHECK(out.frames.allFinite());
}

TEST_CASE("cmvn: normalizing twice changes nothing") {
  FeatureMatrix features;
  features.frames.resize(50, 8);
  Rng rng(19);
  for (int t = 0; t < 50; ++t)
    for (int d = 0; d < 8; ++d) features.frames(t, d) = rng.Gaussian() * (d + 1);
  FeatureMatrix once = Cmvn(features);
  FeatureMatrix twice = Cmvn(once);
  CHECK((once.frames - twice.frames).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("cmvn: column means vanish") {
  FeatureMatrix features;
  features.frames.resize(100, 20);
  Rng rng(23);
  for (int t = 0; t < 100; ++t)
    for (int d = 0; d < 20; ++d) features.frames(t, d) = rng.Gaussian() * 3 + d;
  FeatureMatrix out = Cmvn(features);
  for (int d = 0; d < 20; ++d) {
    CHECK(std::abs(out.frames.col(d).mean()) < 1e-9);
    double var = out.frames.col(d).squaredNorm() / 100.0;
    CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("cmvn: one frame is degenerate input") {
  FeatureMatrix features;
  features.frames.resize(1, 4);
  features.frames.setZero();
  CHECK_THROWS_AS(Cmvn(features), InputError);
}

TEST_CASE("feature cache: header plus float32 payload round trip") {
  TempDir dir("feature_cache");
  FeatureMatrix features;
  features.frames.resize(7, 5);
  Rng rng(29);
  for (int t = 0; t < 7; ++t)
    for (int d = 0; d < 5; ++d) features.frames(t, d) = rng.Gaussian();
  std::string path = dir.File("x.feats");
  WriteFeatureCache(path, features);
  FeatureMatrix loaded = ReadFeatureCache(path);
  REQUIRE(loaded.NumFrames() == 7);
  REQUIRE(loaded.Dim() == 5);
  for (int t = 0; t < 7; ++t)
    for (int d = 0; d < 5; ++d)
      CHECK(loaded.frames(t, d) ==
            static_cast<double>(static_cast<float>(features.frames(t, d))));
}

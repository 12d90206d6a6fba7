// frontend/mfcc.cc

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

#include "frontend/mfcc.h"

#include <algorithm>
#include <cmath>
#include <complex>

#include "base/error.h"

namespace speechmark {

namespace {

size_t NextPow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 FFT.
void Fft(std::vector<std::complex<double>> *buf) {
  size_t n = buf->size();
  auto &a = *buf;
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * M_PI / static_cast<double>(len);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular mel filterbank over FFT bins [0, n_fft/2].
std::vector<std::vector<double>> MelFilterbank(int num_filters, size_t n_fft,
                                               int sample_rate) {
  double low_hz = 20.0;
  double high_hz = sample_rate / 2.0;
  double low_mel = HzToMel(low_hz), high_mel = HzToMel(high_hz);
  size_t n_bins = n_fft / 2 + 1;
  std::vector<double> centers(num_filters + 2);
  for (int i = 0; i < num_filters + 2; ++i) {
    double mel = low_mel + (high_mel - low_mel) * i / (num_filters + 1);
    centers[i] = MelToHz(mel) * static_cast<double>(n_fft) / sample_rate;
  }
  std::vector<std::vector<double>> bank(num_filters, std::vector<double>(n_bins, 0.0));
  for (int m = 0; m < num_filters; ++m) {
    double left = centers[m], mid = centers[m + 1], right = centers[m + 2];
    for (size_t bin = 0; bin < n_bins; ++bin) {
      double b = static_cast<double>(bin);
      if (b > left && b < mid) {
        bank[m][bin] = (b - left) / (mid - left);
      } else if (b >= mid && b < right) {
        bank[m][bin] = (right - b) / (right - mid);
      }
    }
  }
  return bank;
}

}  // namespace

std::vector<double> MagnitudeSpectrum(const std::vector<double> &windowed) {
  size_t n_fft = NextPow2(windowed.size());
  std::vector<std::complex<double>> buf(n_fft, {0.0, 0.0});
  for (size_t i = 0; i < windowed.size(); ++i) buf[i] = {windowed[i], 0.0};
  Fft(&buf);
  std::vector<double> mag(n_fft / 2 + 1);
  for (size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(buf[i]);
  return mag;
}

FeatureMatrix ExtractMfcc(const AudioSignal &signal, const FrontendConfig &config) {
  SM_REQUIRE(signal.sample_rate > 0, InputError, "signal has no sample rate");
  SM_REQUIRE(config.num_filters >= config.num_coeffs, ConfigError,
             "mel filter count must be >= coefficient count");
  size_t window = static_cast<size_t>(std::lround(config.window_ms * 1e-3 * signal.sample_rate));
  size_t shift = static_cast<size_t>(std::lround(config.shift_ms * 1e-3 * signal.sample_rate));
  SM_REQUIRE(window > 0 && shift > 0, ConfigError, "window and shift must be positive");
  if (signal.samples.size() < window)
    throw InputError("audio shorter than one analysis window");

  size_t num_frames = (signal.samples.size() - window) / shift + 1;
  size_t n_fft = NextPow2(window);
  auto bank = MelFilterbank(config.num_filters, n_fft, signal.sample_rate);

  std::vector<double> hamming(window);
  for (size_t i = 0; i < window; ++i)
    hamming[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (window - 1));

  int n_mel = config.num_filters;
  int n_out = config.num_coeffs;
  Eigen::MatrixXd dct(n_out, n_mel);
  for (int k = 0; k < n_out; ++k) {
    double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n_mel);
    for (int m = 0; m < n_mel; ++m)
      dct(k, m) = scale * std::cos(M_PI * k * (m + 0.5) / n_mel);
  }

  Eigen::MatrixXd frames(num_frames, n_out);
  std::vector<double> windowed(window);
  std::vector<double> frame_energy(num_frames);
  for (size_t t = 0; t < num_frames; ++t) {
    const double *x = signal.samples.data() + t * shift;
    double energy = 0.0;
    for (size_t i = 0; i < window; ++i) {
      double emphasized = (i == 0) ? x[0] * (1.0 - config.preemphasis)
                                   : x[i] - config.preemphasis * x[i - 1];
      windowed[i] = emphasized * hamming[i];
      energy += x[i] * x[i];
    }
    frame_energy[t] = energy;
    auto mag = MagnitudeSpectrum(windowed);
    Eigen::VectorXd log_mel(n_mel);
    for (int m = 0; m < n_mel; ++m) {
      double acc = 0.0;
      for (size_t bin = 0; bin < mag.size(); ++bin)
        acc += bank[m][bin] * mag[bin] * mag[bin];
      log_mel(m) = std::log(std::max(acc, config.log_floor));
    }
    frames.row(t) = (dct * log_mel).transpose();
  }

  if (config.vad && num_frames > 1) {
    double max_energy = *std::max_element(frame_energy.begin(), frame_energy.end());
    double threshold = max_energy * std::pow(10.0, -config.vad_drop_db / 10.0);
    std::vector<size_t> keep;
    for (size_t t = 0; t < num_frames; ++t)
      if (frame_energy[t] >= threshold) keep.push_back(t);
    if (!keep.empty() && keep.size() < num_frames) {
      Eigen::MatrixXd kept(keep.size(), n_out);
      for (size_t i = 0; i < keep.size(); ++i) kept.row(i) = frames.row(keep[i]);
      frames = std::move(kept);
    }
  }

  FeatureMatrix out;
  out.frames = std::move(frames);
  out.frame_shift = config.shift_ms * 1e-3;
  out.frame_length = config.window_ms * 1e-3;
  return out;
}

FeatureMatrix Cmvn(const FeatureMatrix &features) {
  const auto &x = features.frames;
  SM_REQUIRE(x.rows() >= 2, InputError, "cmvn needs at least 2 frames");
  FeatureMatrix out = features;
  Eigen::RowVectorXd mean = x.colwise().mean();
  out.frames = x.rowwise() - mean;
  for (int d = 0; d < out.frames.cols(); ++d) {
    double var = out.frames.col(d).squaredNorm() / x.rows();
    if (var >= 1e-10) out.frames.col(d) /= std::sqrt(var);
  }
  return out;
}

}  // namespace speechmark

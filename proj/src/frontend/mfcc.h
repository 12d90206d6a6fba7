// frontend/mfcc.h

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

#ifndef SPEECHMARK_FRONTEND_MFCC_H_
#define SPEECHMARK_FRONTEND_MFCC_H_

#include <Eigen/Dense>
#include <vector>

#include "corpus/wav.h"

namespace speechmark {

struct FrontendConfig {
  double window_ms = 25.0;
  double shift_ms = 10.0;
  int num_coeffs = 20;       // F
  int num_filters = 23;      // mel filters, must be >= num_coeffs
  double preemphasis = 0.97;
  double log_floor = 1e-10;
  bool vad = false;          // energy gate, off by default
  double vad_drop_db = 40.0; // drop frames this far below the loudest frame
};

// T x F acoustic features of one recording.
struct FeatureMatrix {
  Eigen::MatrixXd frames;     // T rows, F columns
  double frame_shift = 0.01;  // seconds
  double frame_length = 0.025;

  int NumFrames() const { return static_cast<int>(frames.rows()); }
  int Dim() const { return static_cast<int>(frames.cols()); }
};

// Pre-emphasis, Hamming window, magnitude spectrum, mel filterbank, log,
// DCT-II (orthonormal), first F coefficients.  T = (len - window)/shift + 1.
// Throws InputError when the signal is shorter than one window.
FeatureMatrix ExtractMfcc(const AudioSignal &signal, const FrontendConfig &config);

// Per-dimension zero mean / unit variance over frames; dimensions with
// variance below 1e-10 are centered only.  Needs at least 2 frames.
FeatureMatrix Cmvn(const FeatureMatrix &features);

// Magnitude spectrum helper (radix-2 FFT), exposed for the frontend tests.
std::vector<double> MagnitudeSpectrum(const std::vector<double> &windowed);

}  // namespace speechmark

#endif  // SPEECHMARK_FRONTEND_MFCC_H_

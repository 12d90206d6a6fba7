// corpus/wav.h

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

#ifndef SPEECHMARK_CORPUS_WAV_H_
#define SPEECHMARK_CORPUS_WAV_H_

#include <string>
#include <vector>

namespace speechmark {

struct AudioSignal {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = 0;

  double DurationSeconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

// Reads a RIFF PCM WAV file (8 or 16 bit, any channel count), averages
// channels to mono, scales to [-1, 1] and linearly resamples to target_rate.
// Throws IoError for missing/corrupt files, InputError for empty audio.
AudioSignal ReadAudio(const std::string &path, int target_rate);

// Linear-interpolation resampler; identity when rates match.
std::vector<double> ResampleLinear(const std::vector<double> &samples,
                                   int src_rate, int dst_rate);

// 16-bit PCM mono writer (used by the synthetic data generator).
void WriteWav16(const std::string &path, const std::vector<double> &samples,
                int sample_rate);

}  // namespace speechmark

#endif  // SPEECHMARK_CORPUS_WAV_H_

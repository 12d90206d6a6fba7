// cli/synth.h

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

#ifndef SPEECHMARK_CLI_SYNTH_H_
#define SPEECHMARK_CLI_SYNTH_H_

#include <string>

namespace speechmark {

struct SynthOptions {
  int cases = 200;  // split evenly across the two classes
  uint64_t seed = 7;
  int sample_rate = 16000;
  double min_seconds = 1.7;
  double max_seconds = 2.6;
  int min_tokens = 30;
  int max_tokens = 60;
};

// Writes a fully deterministic two-class corpus under `dir`: WAV audio from
// per-class sinusoid-mixture sources, transcripts from per-class Markov
// chains, and a manifest.csv with paths relative to the manifest.  Class A
// is labeled Dementia, class B Control.  Returns the manifest path.
std::string GenerateSyntheticCorpus(const std::string &dir, const SynthOptions &opts);

}  // namespace speechmark

#endif  // SPEECHMARK_CLI_SYNTH_H_

// cli/synth.cc

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

#include "cli/synth.h"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "base/error.h"
#include "base/io.h"
#include "base/rng.h"
#include "corpus/wav.h"

namespace speechmark {

namespace {

const char *kVocab[] = {"ba", "de", "fi", "go", "ku", "la", "me", "ni",
                        "po", "ra", "su", "ti", "vo", "wa", "ze", "bi",
                        "do", "fa", "ge", "ki", "lo", "mu", "ne", "pa"};
constexpr int kVocabSize = 24;

// Sparse first-order chains; the two classes prefer different successors,
// which is what the class-conditional n-gram models must pick up.
int NextToken(int current, bool class_a, Rng *rng) {
  double r = rng->UniformDouble();
  if (class_a) {
    if (r < 0.55) return (current + 1) % kVocabSize;
    if (r < 0.80) return (current + 3) % kVocabSize;
  } else {
    if (r < 0.55) return (current + 2) % kVocabSize;
    if (r < 0.80) return (current + 7) % kVocabSize;
  }
  return static_cast<int>(rng->UniformInt(kVocabSize));
}

std::string MakeTranscript(bool class_a, const SynthOptions &opts, Rng *rng) {
  int n_tokens = opts.min_tokens +
                 static_cast<int>(rng->UniformInt(opts.max_tokens - opts.min_tokens + 1));
  std::ostringstream out;
  int state = static_cast<int>(rng->UniformInt(kVocabSize));
  int line_len = 0;
  for (int i = 0; i < n_tokens; ++i) {
    out << kVocab[state];
    ++line_len;
    if (line_len >= 10) {
      out << "\n";
      line_len = 0;
    } else {
      out << " ";
    }
    state = NextToken(state, class_a, rng);
  }
  out << "\n";
  return out.str();
}

// Mixture audio source: each 25 ms block draws one sinusoid component.
std::vector<double> MakeAudio(bool class_a, const SynthOptions &opts, Rng *rng) {
  const double base_freqs_a[3] = {350.0, 900.0, 1700.0};
  const double base_freqs_b[3] = {520.0, 1250.0, 2400.0};
  const double amps[3] = {0.50, 0.35, 0.25};
  const double *base = class_a ? base_freqs_a : base_freqs_b;

  double freqs[3];
  for (int j = 0; j < 3; ++j) freqs[j] = base[j] * rng->UniformDouble(0.98, 1.02);
  double gain = rng->UniformDouble(0.85, 1.0);

  double seconds = rng->UniformDouble(opts.min_seconds, opts.max_seconds);
  size_t n = static_cast<size_t>(seconds * opts.sample_rate);
  size_t block = static_cast<size_t>(opts.sample_rate) / 40;  // 25 ms
  std::vector<double> samples(n, 0.0);
  size_t at = 0;
  while (at < n) {
    double r = rng->UniformDouble();
    int component = r < 0.5 ? 0 : (r < 0.8 ? 1 : 2);
    size_t end = std::min(n, at + block);
    for (size_t i = at; i < end; ++i) {
      double t = static_cast<double>(i) / opts.sample_rate;
      samples[i] = gain * (amps[component] * std::sin(2.0 * M_PI * freqs[component] * t) +
                           0.02 * rng->Gaussian());
    }
    at = end;
  }
  return samples;
}

}  // namespace

std::string GenerateSyntheticCorpus(const std::string &dir, const SynthOptions &opts) {
  SM_REQUIRE(opts.cases >= 2 && opts.cases % 2 == 0, ConfigError,
             "synthetic case count must be even and >= 2");
  SM_REQUIRE(opts.min_seconds > 0.2 && opts.max_seconds >= opts.min_seconds,
             ConfigError, "invalid synthetic duration range");
  EnsureDir(dir);
  EnsureDir(dir + "/audio");
  EnsureDir(dir + "/text");

  Rng rng(opts.seed);
  std::ostringstream manifest;
  manifest << "id,audio,transcript,label\n";
  for (int i = 0; i < opts.cases; ++i) {
    bool class_a = i < opts.cases / 2;
    char id[32];
    std::snprintf(id, sizeof(id), "case%04d", i);
    std::string wav_rel = std::string("audio/") + id + ".wav";
    std::string txt_rel = std::string("text/") + id + ".txt";
    WriteWav16(dir + "/" + wav_rel, MakeAudio(class_a, opts, &rng), opts.sample_rate);
    WriteTextFile(dir + "/" + txt_rel, MakeTranscript(class_a, opts, &rng));
    manifest << id << "," << wav_rel << "," << txt_rel << ","
             << (class_a ? "Dementia" : "Control") << "\n";
  }
  std::string manifest_path = dir + "/manifest.csv";
  WriteTextFile(manifest_path, manifest.str());
  return manifest_path;
}

}  // namespace speechmark

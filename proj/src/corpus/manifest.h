// corpus/manifest.h

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

#ifndef SPEECHMARK_CORPUS_MANIFEST_H_
#define SPEECHMARK_CORPUS_MANIFEST_H_

#include <string>
#include <vector>

namespace speechmark {

enum class Label { kDementia = 0, kControl = 1 };

std::string LabelName(Label label);
Label ParseLabel(const std::string &s);  // throws ParseError on unknown names

// One interview: audio + transcript + diagnostic label + cross-validation
// fold.  Folds are assigned at load time and never change afterwards.
struct Recording {
  std::string id;
  std::string audio_path;
  std::string transcript_path;
  Label label = Label::kControl;
  int fold = -1;
};

// Reads a manifest CSV (header row `id,audio,transcript,label`, one record
// per line) and assigns folds.  Records are shuffled per label group with a
// seeded generator and then dealt round-robin with a running global offset,
// so per-label fold sizes differ by at most one and every fold is non-empty
// once the dataset has at least k_folds rows.
std::vector<Recording> LoadManifest(const std::string &path, int k_folds,
                                    uint64_t seed);

// Fold assignment on already-loaded records (used by the synthetic
// generator); same stratified scheme as LoadManifest.
void AssignFolds(std::vector<Recording> *recordings, int k_folds,
                 uint64_t seed);

}  // namespace speechmark

#endif  // SPEECHMARK_CORPUS_MANIFEST_H_

// corpus/transcript.h

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

#ifndef SPEECHMARK_CORPUS_TRANSCRIPT_H_
#define SPEECHMARK_CORPUS_TRANSCRIPT_H_

#include <string>
#include <vector>

namespace speechmark {

// Lowercased word tokens of one transcript.  Start/end padding is the
// language model's business, not stored here.
using TokenSequence = std::vector<std::string>;

// Turns raw transcript text into tokens: lowercase, split on whitespace,
// drop empties.  With strip_chat_markup set, only participant (*PAR:)
// utterance lines survive and bracket codes, &-prefixed fillers and
// punctuation are removed first.  This is a line filter, not a CHAT parser.
TokenSequence NormalizeTranscript(const std::string &raw, bool strip_chat_markup);

}  // namespace speechmark

#endif  // SPEECHMARK_CORPUS_TRANSCRIPT_H_

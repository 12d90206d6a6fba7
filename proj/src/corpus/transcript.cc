// corpus/transcript.cc

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

#include "corpus/transcript.h"

#include <cctype>
#include <sstream>

namespace speechmark {

namespace {

std::string LowerAscii(const std::string &s) {
  std::string out = s;
  for (char &c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

// Removes [...] code groups; unbalanced brackets are dropped to end of line.
std::string RemoveBracketCodes(const std::string &s) {
  std::string out;
  int depth = 0;
  for (char c : s) {
    if (c == '[') {
      ++depth;
    } else if (c == ']') {
      if (depth > 0) --depth;
    } else if (depth == 0) {
      out.push_back(c);
    }
  }
  return out;
}

bool IsWordChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'' ||
         c == '-' || static_cast<unsigned char>(c) >= 0x80;
}

void AppendCleanTokens(const std::string &line, TokenSequence *tokens) {
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) {
    if (tok[0] == '&') continue;  // filler / paralinguistic code
    std::string clean;
    for (char c : tok)
      if (IsWordChar(c)) clean.push_back(c);
    if (!clean.empty() && clean.find_first_not_of("'-") != std::string::npos)
      tokens->push_back(clean);
  }
}

void AppendPlainTokens(const std::string &line, TokenSequence *tokens) {
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) tokens->push_back(tok);
}

}  // namespace

TokenSequence NormalizeTranscript(const std::string &raw,
                                  bool strip_chat_markup) {
  TokenSequence tokens;
  std::istringstream lines(raw);
  std::string line;
  bool in_par_tier = false;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string lower = LowerAscii(line);
    if (!strip_chat_markup) {
      AppendPlainTokens(lower, &tokens);
      continue;
    }
    // Tier bookkeeping: *PAR: opens the participant tier, any other marker
    // closes it, indented lines continue the current tier.
    if (!lower.empty() && (lower[0] == '*' || lower[0] == '%' || lower[0] == '@')) {
      in_par_tier = lower.rfind("*par:", 0) == 0;
      if (!in_par_tier) continue;
      lower = lower.substr(5);
    } else if (!in_par_tier) {
      continue;
    }
    AppendCleanTokens(RemoveBracketCodes(lower), &tokens);
  }
  return tokens;
}

}  // namespace speechmark

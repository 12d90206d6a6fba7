// corpus/manifest.cc

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

#include "corpus/manifest.h"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "base/error.h"
#include "base/rng.h"

namespace speechmark {

std::string LabelName(Label label) {
  return label == Label::kDementia ? "Dementia" : "Control";
}

Label ParseLabel(const std::string &s) {
  std::string lower;
  lower.reserve(s.size());
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "dementia") return Label::kDementia;
  if (lower == "control") return Label::kControl;
  throw ParseError("unknown label \"" + s + "\" (expected Dementia or Control)");
}

namespace {

std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitCsvLine(const std::string &line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(Trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

// Relative audio/transcript paths are taken relative to the manifest file,
// so a corpus directory can move as a unit.
std::string ResolvePath(const std::string &manifest_path, const std::string &path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(manifest_path).parent_path() / p).string();
}

}  // namespace

void AssignFolds(std::vector<Recording> *recordings, int k_folds,
                 uint64_t seed) {
  SM_REQUIRE(k_folds >= 1, ConfigError, "k_folds must be >= 1");
  Rng rng(seed);
  // Indices per label group, in manifest order.
  std::vector<std::vector<size_t>> groups(2);
  for (size_t i = 0; i < recordings->size(); ++i)
    groups[static_cast<int>((*recordings)[i].label)].push_back(i);
  // Shuffle each group, then deal round-robin.  The running offset carries
  // across groups so small groups do not pile onto the same low folds.
  size_t offset = 0;
  for (auto &group : groups) {
    rng.Shuffle(&group);
    for (size_t i = 0; i < group.size(); ++i) {
      (*recordings)[group[i]].fold = static_cast<int>((offset + i) % k_folds);
    }
    offset += group.size();
  }
}

std::vector<Recording> LoadManifest(const std::string &path, int k_folds,
                                    uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);

  std::vector<Recording> recordings;
  std::set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    if (!header_seen) {
      auto header = SplitCsvLine(trimmed);
      if (header.size() != 4 || header[0] != "id" || header[1] != "audio" ||
          header[2] != "transcript" || header[3] != "label") {
        throw ParseError("manifest " + path +
                         ": first row must be the header id,audio,transcript,label");
      }
      header_seen = true;
      continue;
    }
    auto fields = SplitCsvLine(trimmed);
    if (fields.size() != 4)
      throw ParseError("manifest " + path + " line " + std::to_string(line_no) +
                       ": expected 4 fields, got " + std::to_string(fields.size()));
    Recording rec;
    rec.id = fields[0];
    rec.audio_path = ResolvePath(path, fields[1]);
    rec.transcript_path = ResolvePath(path, fields[2]);
    try {
      rec.label = ParseLabel(fields[3]);
    } catch (const ParseError &e) {
      throw ParseError("manifest " + path + " line " + std::to_string(line_no) +
                       " (id " + rec.id + "): " + e.what());
    }
    if (rec.id.empty())
      throw ParseError("manifest " + path + " line " + std::to_string(line_no) +
                       ": empty id");
    if (!seen_ids.insert(rec.id).second)
      throw ParseError("manifest " + path + " line " + std::to_string(line_no) +
                       ": duplicate id " + rec.id);
    recordings.push_back(std::move(rec));
  }
  if (!header_seen) throw ParseError("manifest " + path + ": empty file");

  AssignFolds(&recordings, k_folds, seed);
  return recordings;
}

}  // namespace speechmark

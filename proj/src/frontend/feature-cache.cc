// frontend/feature-cache.cc

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

#include "frontend/feature-cache.h"

#include <cstring>
#include <fstream>

#include "base/error.h"

namespace speechmark {

namespace {

void PutU32(std::ofstream &out, uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

uint32_t GetU32(std::ifstream &in, const std::string &path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char *>(b), 4);
  if (!in) throw IoError("truncated feature cache: " + path);
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

}  // namespace

void WriteFeatureCache(const std::string &path, const FeatureMatrix &features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  uint32_t rows = static_cast<uint32_t>(features.frames.rows());
  uint32_t cols = static_cast<uint32_t>(features.frames.cols());
  PutU32(out, rows);
  PutU32(out, cols);
  for (uint32_t t = 0; t < rows; ++t) {
    for (uint32_t d = 0; d < cols; ++d) {
      float v = static_cast<float>(features.frames(t, d));
      uint32_t bits;
      std::memcpy(&bits, &v, 4);
      PutU32(out, bits);
    }
  }
  out.close();
  if (out.fail()) throw IoError("write failed: " + path);
}

FeatureMatrix ReadFeatureCache(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  uint32_t rows = GetU32(in, path);
  uint32_t cols = GetU32(in, path);
  FeatureMatrix features;
  features.frames.resize(rows, cols);
  for (uint32_t t = 0; t < rows; ++t) {
    for (uint32_t d = 0; d < cols; ++d) {
      uint32_t bits = GetU32(in, path);
      float v;
      std::memcpy(&v, &bits, 4);
      features.frames(t, d) = v;
    }
  }
  return features;
}

}  // namespace speechmark

// base/io.h

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

#ifndef SPEECHMARK_BASE_IO_H_
#define SPEECHMARK_BASE_IO_H_

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "base/error.h"

namespace speechmark {

// Little-endian binary writer for the versioned model files.  Everything is
// written byte by byte so files are identical across hosts.
class BinaryWriter {
 public:
  BinaryWriter(const std::string &path, const std::string &magic,
               uint32_t version);
  ~BinaryWriter();

  void WriteU32(uint32_t v);
  void WriteU64(uint64_t v);
  void WriteF64(double v);
  void WriteF32(float v);
  void WriteString(const std::string &s);  // u32 length + bytes
  void WriteF64Array(const double *data, size_t n);

  void Close();

 private:
  std::ofstream out_;
  std::string path_;
};

class BinaryReader {
 public:
  // Opens and checks magic + version; throws IoError on mismatch.
  BinaryReader(const std::string &path, const std::string &magic,
               uint32_t expected_version);

  uint32_t ReadU32();
  uint64_t ReadU64();
  double ReadF64();
  float ReadF32();
  std::string ReadString();
  void ReadF64Array(double *data, size_t n);

 private:
  std::ifstream in_;
  std::string path_;
};

std::string ReadTextFile(const std::string &path);
void WriteTextFile(const std::string &path, const std::string &content);
bool FileExists(const std::string &path);
void EnsureDir(const std::string &path);

}  // namespace speechmark

#endif  // SPEECHMARK_BASE_IO_H_

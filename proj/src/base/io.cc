// base/io.cc

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

#include "base/io.h"

#include <cstring>
#include <filesystem>
#include <sstream>

namespace speechmark {

namespace {

void PutLE(std::ofstream &out, uint64_t v, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, bytes);
}

uint64_t GetLE(std::ifstream &in, int bytes, const std::string &path) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char *>(buf), bytes);
  if (!in) throw IoError("truncated read from " + path);
  uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

BinaryWriter::BinaryWriter(const std::string &path, const std::string &magic,
                           uint32_t version)
    : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw IoError("cannot open for writing: " + path);
  out_.write(magic.data(), static_cast<std::streamsize>(magic.size()));
  WriteU32(version);
}

BinaryWriter::~BinaryWriter() {
  if (out_.is_open()) out_.close();
}

void BinaryWriter::WriteU32(uint32_t v) { PutLE(out_, v, 4); }
void BinaryWriter::WriteU64(uint64_t v) { PutLE(out_, v, 8); }

void BinaryWriter::WriteF64(double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  PutLE(out_, bits, 8);
}

void BinaryWriter::WriteF32(float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  PutLE(out_, bits, 4);
}

void BinaryWriter::WriteString(const std::string &s) {
  WriteU32(static_cast<uint32_t>(s.size()));
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryWriter::WriteF64Array(const double *data, size_t n) {
  for (size_t i = 0; i < n; ++i) WriteF64(data[i]);
}

void BinaryWriter::Close() {
  out_.close();
  if (out_.fail()) throw IoError("write failed: " + path_);
}

BinaryReader::BinaryReader(const std::string &path, const std::string &magic,
                           uint32_t expected_version)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw IoError("cannot open for reading: " + path);
  std::string got(magic.size(), '\0');
  in_.read(got.data(), static_cast<std::streamsize>(magic.size()));
  if (!in_ || got != magic)
    throw IoError("bad magic in " + path + " (expected " + magic + ")");
  uint32_t version = ReadU32();
  if (version != expected_version) {
    std::ostringstream oss;
    oss << "unsupported version " << version << " in " << path << " (expected "
        << expected_version << ")";
    throw IoError(oss.str());
  }
}

uint32_t BinaryReader::ReadU32() {
  return static_cast<uint32_t>(GetLE(in_, 4, path_));
}

uint64_t BinaryReader::ReadU64() { return GetLE(in_, 8, path_); }

double BinaryReader::ReadF64() {
  uint64_t bits = GetLE(in_, 8, path_);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

float BinaryReader::ReadF32() {
  uint32_t bits = static_cast<uint32_t>(GetLE(in_, 4, path_));
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

std::string BinaryReader::ReadString() {
  uint32_t n = ReadU32();
  std::string s(n, '\0');
  in_.read(s.data(), n);
  if (!in_) throw IoError("truncated string in " + path_);
  return s;
}

void BinaryReader::ReadF64Array(double *data, size_t n) {
  for (size_t i = 0; i < n; ++i) data[i] = ReadF64();
}

std::string ReadTextFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream oss;
  oss << in.rdbuf();
  return oss.str();
}

void WriteTextFile(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (out.fail()) throw IoError("write failed: " + path);
}

bool FileExists(const std::string &path) {
  std::error_code ec;
  return std::filesystem::exists(path, ec);
}

void EnsureDir(const std::string &path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory " + path + ": " + ec.message());
}

}  // namespace speechmark

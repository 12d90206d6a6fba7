// base/hash.h

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

#ifndef SPEECHMARK_BASE_HASH_H_
#define SPEECHMARK_BASE_HASH_H_

#include <cstdint>
#include <cstring>
#include <string>

namespace speechmark {

// FNV-1a, used for config fingerprints and model identity hashes.
class Fnv1a {
 public:
  Fnv1a() : state_(0xcbf29ce484222325ull) {}

  void Update(const void *data, size_t n) {
    const unsigned char *p = static_cast<const unsigned char *>(data);
    for (size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ull;
    }
  }

  void Update(const std::string &s) { Update(s.data(), s.size()); }

  void Update(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    Update(&bits, 8);
  }

  void Update(uint64_t v) { Update(&v, 8); }

  uint64_t Digest() const { return state_; }

 private:
  uint64_t state_;
};

std::string HashToHex(uint64_t h);
uint64_t HashString(const std::string &s);

}  // namespace speechmark

#endif  // SPEECHMARK_BASE_HASH_H_

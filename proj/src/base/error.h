// base/error.h

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

#ifndef SPEECHMARK_BASE_ERROR_H_
#define SPEECHMARK_BASE_ERROR_H_

#include <stdexcept>
#include <string>

namespace speechmark {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Bad user-facing configuration (unknown key, invalid value, bad grid).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &msg) : Error(msg) {}
};

// File access / format problems while reading or writing artifacts.
class IoError : public Error {
 public:
  explicit IoError(const std::string &msg) : Error(msg) {}
};

// Malformed manifest rows, labels, or text inputs.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string &msg) : Error(msg) {}
};

// Invalid runtime input to an operation (dimension mismatch, NaN, empty).
class InputError : public Error {
 public:
  explicit InputError(const std::string &msg) : Error(msg) {}
};

// A training precondition failed (single class, too few frames, ...).
class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string &msg) : Error(msg) {}
};

// Internal bookkeeping broke (hash mismatch, invariant violation).
class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string &msg) : Error(msg) {}
};

// A test-fold id leaked into a training stage.  Always fatal.
class LeakageError : public ConsistencyError {
 public:
  explicit LeakageError(const std::string &msg) : ConsistencyError(msg) {}
};

#define SM_REQUIRE(cond, exc_type, msg)     \
  do {                                      \
    if (!(cond)) throw exc_type(msg);       \
  } while (0)

}  // namespace speechmark

#endif  // SPEECHMARK_BASE_ERROR_H_

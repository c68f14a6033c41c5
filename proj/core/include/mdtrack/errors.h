// Copyright 2026 The mdtrack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MDTRACK_ERRORS_H_
#define MDTRACK_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mdtrack {

// Shape or dimension disagreement between operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A NaN or Inf was produced or supplied.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration (unknown key, bad value, unreachable architecture).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class DataErrorKind {
  kMalformed,  // unparsable header or record
  kTruncated,  // file ends inside a record
  kMismatch,   // files disagree with each other (e.g. label vs frame count)
  kMissing,    // a required file is absent or unreadable
};

// Malformed or inconsistent input data. Carries the offending file and the
// byte offset (or line number for line-oriented text) where parsing stopped.
class DataError : public std::runtime_error {
 public:
  DataError(std::string file, std::uint64_t offset, const std::string& what,
            DataErrorKind kind = DataErrorKind::kMalformed)
      : std::runtime_error(file + " @" + std::to_string(offset) + ": " + what),
        file_(std::move(file)),
        offset_(offset),
        kind_(kind) {}

  const std::string& file() const { return file_; }
  std::uint64_t offset() const { return offset_; }
  DataErrorKind kind() const { return kind_; }

 private:
  std::string file_;
  std::uint64_t offset_;
  DataErrorKind kind_;
};

}  // namespace mdtrack

#endif  // MDTRACK_ERRORS_H_

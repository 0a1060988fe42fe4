// Copyright 2026 The NOC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NOC_ERRORS_H_
#define NOC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace noc {

// Base of every error thrown by the library. The CLI maps these to exit
// code 1 (domain error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class MissingEmbeddingError : public Error {
 public:
  explicit MissingEmbeddingError(const std::string& token)
      : Error("no embedding for vocabulary token '" + token + "'"),
        token_(token) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed command-line usage; the CLI maps it to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Raised when a held-out split cannot supply enough test images.
class InsufficiencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace noc

#endif  // NOC_ERRORS_H_

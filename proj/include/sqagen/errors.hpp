// Copyright (c) 2026 The sqagen Authors
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

#ifndef SQAGEN_ERRORS_HPP_
#define SQAGEN_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sqagen {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value broke one of the domain-type invariants.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Bad configuration or usage; the CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A manifest line failed to parse or validate. line() is 1-based.
class ManifestError : public Error {
 public:
  ManifestError(std::string path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

}  // namespace sqagen

#endif  // SQAGEN_ERRORS_HPP_

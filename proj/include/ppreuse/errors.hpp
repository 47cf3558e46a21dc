// Copyright 2026 The ppreuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PPREUSE_ERRORS_HPP_
#define PPREUSE_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppreuse {

// Base for every domain error raised by the library. The CLI maps these to
// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Inputs that are individually well formed but inconsistent with each other
// (universe mismatch, duplicate ids, unknown arms, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Model file problems: schema version, checksum, probability mass.
class ModelError : public Error {
 public:
  using Error::Error;
};

// Raised by a FuzzerPort when a test cannot be executed.
class ExecutionError : public Error {
 public:
  using Error::Error;
};

}  // namespace ppreuse

#endif  // PPREUSE_ERRORS_HPP_

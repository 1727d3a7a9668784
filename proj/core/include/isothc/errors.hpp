// Copyright 2026 The isothc Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace isothc {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not line-specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A Fock space larger than the configured mode cap was requested.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Arguments outside an operation's domain (bad shapes, ranges, invariants).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine produced non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File-system failures (missing input, unwritable output).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace isothc

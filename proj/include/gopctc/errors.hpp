// gopctc/errors.hpp

// Copyright 2025  gopctc authors

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

#ifndef GOPCTC_ERRORS_HPP_
#define GOPCTC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace gopctc {

/// Base of every error raised by the library. `exit_code()` is the process
/// exit status the CLI reports for it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 2; }
};

/// Precondition violated by caller-supplied values.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A character or token that the vocabulary does not contain.
class VocabularyError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Malformed, truncated or otherwise unreadable file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File parsed but its content violates a data invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Problem exceeds a hard size guard.
class SizeError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Numerical procedure failed (e.g. eigensolver did not converge).
class NumericError : public Error {
 public:
  NumericError(const std::string &what, double residual)
      : Error(what), residual_(residual) {}
  int exit_code() const noexcept override { return 3; }
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace gopctc

#endif  // GOPCTC_ERRORS_HPP_

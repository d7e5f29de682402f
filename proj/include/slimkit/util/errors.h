// Copyright 2026 The Slimkit Authors. All Rights Reserved.
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

#ifndef SLIMKIT_UTIL_ERRORS_H_
#define SLIMKIT_UTIL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace slimkit {

// Base for every error raised by the toolkit. The CLI maps subclasses onto
// exit codes: validation-style errors exit 1, runtime-style errors exit 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data or configuration rejected before any work starts.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Failures that happen while work is in progress.
class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

class StateError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class TrainingError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class SurgeryError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class StreamError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class UnprunableModelError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

}  // namespace slimkit

#endif  // SLIMKIT_UTIL_ERRORS_H_

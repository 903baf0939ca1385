// Copyright 2026 The refvos Authors.
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

namespace refvos {

// Every failure surfaced by the library derives from Error. The concrete type
// names the failure class so callers can decide between retry, fallback and
// abort without parsing messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched mask or sequence dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Caller supplied an argument outside the operation's precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

// Structured text (model response, wire format) could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A file parsed but violated the schema. `field_path` points at the offending
// element, e.g. "detections[3].score".
class ValidationError : public Error {
 public:
  ValidationError(std::string field_path, const std::string& what)
      : Error(field_path + ": " + what), field_path_(std::move(field_path)) {}

  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

// Not enough data to fit a model (too few points, collinear samples, flat
// images).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Feature tracking left too few correspondences to fit a camera model.
class InsufficientFeaturesError : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Camera model or transform could not be used (e.g. not invertible).
class ModelError : public Error {
 public:
  using Error::Error;
};

// Embedding or language-model backend failure.
class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace refvos

// Copyright 2026 The vfr Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace vfr {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid task spec, run config, schema violation, or variant/view mismatch.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// A well-formed message that violates the answer or action contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Model output that does not contain the required final-line marker.
class ParseError : public Error {
 public:
  using Error::Error;
};

class AnnotationError : public Error {
 public:
  using Error::Error;
};

/// Transport failure or timeout after all retries were spent.
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

/// The endpoint answered with a non-2xx status.
class BackendError : public Error {
 public:
  BackendError(int status, std::string body_excerpt)
      : Error("backend returned HTTP " + std::to_string(status) + ": " + body_excerpt),
        status_(status),
        body_(std::move(body_excerpt)) {}

  int status() const noexcept { return status_; }
  const std::string& body_excerpt() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vfr

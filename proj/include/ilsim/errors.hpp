// Copyright 2026 The ilsim Authors
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

#ifndef ILSIM_ERRORS_HPP_
#define ILSIM_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ilsim {

// Base class for all library failures. Callers that only need a coarse
// "something went wrong" can catch this; everything below is a refinement.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument violated a precondition (c <= 0, tau <= 0, empty input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A posterior update ended with zero total mass: the observed data is
// inconsistent with every hypothesis that had prior support.
class ContradictionError : public Error {
 public:
  ContradictionError(const std::string& what, std::size_t example_index)
      : Error(what), example_index_(example_index) {}
  // Index of the first example at which the running mass hit zero.
  std::size_t example_index() const { return example_index_; }

 private:
  std::size_t example_index_ = 0;
};

// The effective set admits no hypothesis, so selection cannot proceed.
class InfeasibleEffectiveSetError : public Error {
 public:
  explicit InfeasibleEffectiveSetError(const std::string& what,
                                       std::size_t generation = 0)
      : Error(what), generation_(generation) {}
  // Generation at which an iterated-learning run aborted (0 outside runs).
  std::size_t generation() const { return generation_; }

 private:
  std::size_t generation_ = 0;
};

// An operation was applied to the wrong kind of object (e.g. asking a
// data-level weighting for hypothesis membership).
class MisuseError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration is malformed or fails schema validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A prompt template was rendered with missing or inconsistent slots.
class TemplateError : public Error {
 public:
  using Error::Error;
};

// A model response could not be parsed in the expected format.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::string transcript)
      : Error(what), transcript_(std::move(transcript)) {}
  explicit FormatError(const std::string& what) : Error(what) {}
  const std::string& transcript() const { return transcript_; }

 private:
  std::string transcript_;
};

// Endpoint rejected the credential.
class AuthError : public Error {
 public:
  using Error::Error;
};

// Retry budget exhausted while the endpoint kept rate-limiting.
class RateLimitError : public Error {
 public:
  using Error::Error;
};

// The wire response was not valid chat-completions JSON.
class WireError : public Error {
 public:
  using Error::Error;
};

// Filesystem read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ilsim

#endif  // ILSIM_ERRORS_HPP_

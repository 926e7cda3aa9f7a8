// Copyright 2026 The mrforge Authors.
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

#ifndef MRFORGE_ERROR_H_
#define MRFORGE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mrforge {

// Base class for every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration (ontology, lexicon, attribute map, generator
// settings) or an infeasible request against a valid configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Two source ontologies disagree on a shared attribute.
class MergeConflictError : public ConfigError {
 public:
  MergeConflictError(const std::string &attribute, const std::string &what)
      : ConfigError("merge conflict on attribute '" + attribute + "': " + what),
        attribute_(attribute) {}
  const std::string &attribute() const { return attribute_; }

 private:
  std::string attribute_;
};

// Text that does not follow a grammar. position() is a byte offset into the
// parsed text, line() is 1-based when the text came from a file (0 if not).
class ParseError : public Error {
 public:
  ParseError(const std::string &what, std::size_t position, std::size_t line = 0)
      : Error(what), position_(position), line_(line) {}
  std::size_t position() const { return position_; }
  std::size_t line() const { return line_; }

 private:
  std::size_t position_;
  std::size_t line_;
};

// Input data that parses but violates a contract (invalid MR, count
// mismatch, too many malformed rows, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// A generator endpoint could not be reached or broke the wire protocol.
class EndpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrforge

#endif  // MRFORGE_ERROR_H_

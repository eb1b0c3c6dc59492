// Copyright 2026 The Actipol Authors
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

#ifndef ACTIPOL_ERRORS_HPP
#define ACTIPOL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace actipol {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class UnknownActivityError : public Error {
 public:
  explicit UnknownActivityError(const std::string& id)
      : Error("unknown activity: " + id), activity_id(id) {}
  std::string activity_id;
};

class IllegalTransitionError : public Error {
 public:
  using Error::Error;
};

class NoOpenTransactionError : public Error {
 public:
  NoOpenTransactionError() : Error("no open transaction") {}
};

class TransactionMisuseError : public Error {
 public:
  using Error::Error;
};

/// Admin write refused because an evaluation transaction currently touches
/// the affected activity.
class TransactionBusyError : public Error {
 public:
  explicit TransactionBusyError(const std::string& id)
      : Error("activity is part of an open evaluation transaction: " + id) {}
};

class InvariantViolationError : public Error {
 public:
  using Error::Error;
};

class XmlSyntaxError : public Error {
 public:
  using Error::Error;
};

class JsonSyntaxError : public Error {
 public:
  using Error::Error;
};

/// Document is well-formed but does not conform to the policy dialect.
class SchemaViolationError : public Error {
 public:
  using Error::Error;
};

class UnknownFunctionError : public SchemaViolationError {
 public:
  explicit UnknownFunctionError(const std::string& id)
      : SchemaViolationError("unknown condition function: " + id) {}
};

class UnknownObligationError : public SchemaViolationError {
 public:
  explicit UnknownObligationError(const std::string& id)
      : SchemaViolationError("unknown obligation: " + id) {}
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class FixtureTooSmallError : public Error {
 public:
  using Error::Error;
};

class BenchAbortedError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace actipol

#endif  // ACTIPOL_ERRORS_HPP

// Copyright 2026 The alignmdp Authors
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

namespace alignmdp {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or incomplete MDP/QTable document.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Structurally well-formed MDP that breaks a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An alignment-bound or algorithm precondition does not hold for the given MDP.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Policy enumeration would exceed the configured cap.
class EnumerationInfeasible : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace alignmdp

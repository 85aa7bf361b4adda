// Copyright 2026 The otbary Authors
// SPDX-License-Identifier: Apache-2.0
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

#ifndef OTBARY_ERRORS_H_
#define OTBARY_ERRORS_H_

#include <stdexcept>
#include <string>

namespace otbary {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or contract-violating input (bad weights, dimension mismatch,
// unreadable files). The CLI maps it to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

// A solver failed to reach its stopping criterion (iteration caps, cycling).
// The CLI maps it to exit code 3.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace otbary

#endif  // OTBARY_ERRORS_H_

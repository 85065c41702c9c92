// Copyright 2026 The barrierkit Authors
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

#ifndef BARRIERKIT_ERRORS_HPP
#define BARRIERKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace barrierkit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model evaluation produced NaN or Inf.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, int component)
      : Error(what + " (component " + std::to_string(component) + ")"),
        component_(component) {}
  int component() const { return component_; }

 private:
  int component_;
};

/// Best-response iteration did not close the min-max / max-min gap.
class SaddleNotFound : public Error {
 public:
  SaddleNotFound(const std::string& what, double gap)
      : Error(what + " (gap " + std::to_string(gap) + ")"), gap_(gap) {}
  double gap() const { return gap_; }

 private:
  double gap_;
};

class NoRoot : public Error {
 public:
  using Error::Error;
};

class Degenerate : public Error {
 public:
  using Error::Error;
};

class NoBound : public Error {
 public:
  using Error::Error;
};

class HamiltonianDrift : public Error {
 public:
  HamiltonianDrift(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class DenominatorSingular : public Error {
 public:
  using Error::Error;
};

class OpenBoundary : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration, parameters or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace barrierkit

#endif  // BARRIERKIT_ERRORS_HPP

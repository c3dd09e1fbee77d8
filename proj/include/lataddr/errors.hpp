// Copyright 2026 The lataddr Authors
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

namespace lataddr {

/// Standing-wave or lattice parameters that cannot realize the node layout.
class GeometryError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Integration failed (step-size underflow, non-finite state).
class IntegrationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A configuration key failed validation. `key()` names the offending entry.
class ConfigError : public std::invalid_argument {
  public:
    ConfigError(std::string key, const std::string &constraint)
        : std::invalid_argument(key + ": " + constraint), key_(std::move(key)),
          constraint_(constraint) {}

    const std::string &key() const noexcept { return key_; }
    const std::string &constraint() const noexcept { return constraint_; }

  private:
    std::string key_;
    std::string constraint_;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace lataddr

/*
 * Copyright 2026 The belltrace authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BELLTRACE_ERRORS_HPP
#define BELLTRACE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace belltrace {

// Error taxonomy. The CLI maps each class to a stable process exit code:
//   UsageError / ConfigError -> 2, DataError -> 3,
//   NumericError / TrainingError / SamplingError -> 4.

// Caller passed arguments that make no sense (bad dimensions, out-of-range
// enum value, malformed point string, ...).
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// A configuration value is outside its documented domain.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A file could not be parsed or fails its schema (CSV, model, config).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A numeric routine failed in a way that must not be masked (LP basis
// breakdown, diverged optimizer, ...).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Model training could not produce a usable result (e.g. every candidate
// was rejected by the quality filter).
struct TrainingError : std::runtime_error {
  explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

// Rejection sampling exhausted its attempt budget.
struct SamplingError : std::runtime_error {
  explicit SamplingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace belltrace

#endif  // BELLTRACE_ERRORS_HPP

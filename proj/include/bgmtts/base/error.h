// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_BASE_ERROR_H_
#define BGMTTS_BASE_ERROR_H_

#include <stdexcept>
#include <string>

namespace bgmtts {

// Bad or missing input data: unreadable audio, malformed manifests,
// mismatched sample rates, signals too short to analyse.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training or inference produced a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid call arguments (shape mismatch, out-of-range parameter).
// Distinct from std::invalid_argument only so callers can map it to the
// data-error exit code without catching unrelated library exceptions.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace bgmtts

#endif  // BGMTTS_BASE_ERROR_H_

// include/phonoprobe/error.h

// Copyright 2026 The phonoprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PHONOPROBE_ERROR_H_
#define PHONOPROBE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace phonoprobe {

enum class ErrorKind {
  kMissingManifest,
  kMalformedManifest,
  kSizeMismatch,
  kNonFiniteValue,
  kInvalidArchive,
  kIoFailure,
  kNoOverlap,
  kDegenerateVector,
  kIncompleteContinuum,
  kLayerMissing,
  kSingleClassData,
  kDimensionMismatch,
  kUnknownToken,
  kMixedKeys,
  kConfigError,
};

std::string_view error_kind_name(ErrorKind kind);

/// All library failures are reported through this exception; `kind()` lets
/// batch drivers record the failure class without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMissingManifest: return "MissingManifest";
    case ErrorKind::kMalformedManifest: return "MalformedManifest";
    case ErrorKind::kSizeMismatch: return "SizeMismatch";
    case ErrorKind::kNonFiniteValue: return "NonFiniteValue";
    case ErrorKind::kInvalidArchive: return "InvalidArchive";
    case ErrorKind::kIoFailure: return "IoFailure";
    case ErrorKind::kNoOverlap: return "NoOverlap";
    case ErrorKind::kDegenerateVector: return "DegenerateVector";
    case ErrorKind::kIncompleteContinuum: return "IncompleteContinuum";
    case ErrorKind::kLayerMissing: return "LayerMissing";
    case ErrorKind::kSingleClassData: return "SingleClassData";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kUnknownToken: return "UnknownToken";
    case ErrorKind::kMixedKeys: return "MixedKeys";
    case ErrorKind::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace phonoprobe

#endif  // PHONOPROBE_ERROR_H_

// Copyright 2026 The Anisotable Authors.
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

#include "anisotable/error.hpp"

namespace anisotable {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::ThetaBoundViolated: return "ThetaBoundViolated";
    case ErrorCode::AlphaOneAsymmetric: return "AlphaOneAsymmetric";
    case ErrorCode::AlphaEqualsOne: return "AlphaEqualsOne";
    case ErrorCode::OriginEvaluation: return "OriginEvaluation";
    case ErrorCode::InvalidScheme: return "InvalidScheme";
    case ErrorCode::JumpCapExceeded: return "JumpCapExceeded";
    case ErrorCode::KappaTooLarge: return "KappaTooLarge";
    case ErrorCode::DegenerateGrid: return "DegenerateGrid";
    case ErrorCode::AllPathsDied: return "AllPathsDied";
    case ErrorCode::TooFewSurvivors: return "TooFewSurvivors";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::MismatchDetected: return "MismatchDetected";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace anisotable

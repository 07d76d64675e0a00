/*
 * Copyright 2026 The binsbom Authors.
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

#include "binsbom/error.h"

namespace binsbom {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kInvalidPattern:
      return "InvalidPattern";
    case ErrorCode::kIoError:
      return "IoError";
    case ErrorCode::kMetadataMismatch:
      return "MetadataMismatch";
    case ErrorCode::kInsufficientProducts:
      return "InsufficientProducts";
    case ErrorCode::kInsufficientClasses:
      return "InsufficientClasses";
    case ErrorCode::kMalformedLine:
      return "MalformedLine";
    case ErrorCode::kEmptyCorpus:
      return "EmptyCorpus";
    case ErrorCode::kLossySequence:
      return "LossySequence";
    case ErrorCode::kProtocolError:
      return "ProtocolError";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kEndpointUnavailable:
      return "EndpointUnavailable";
    case ErrorCode::kZeroVector:
      return "ZeroVector";
    case ErrorCode::kEmptyDataset:
      return "EmptyDataset";
    case ErrorCode::kNonFiniteLoss:
      return "NonFiniteLoss";
    case ErrorCode::kEmptyInput:
      return "EmptyInput";
    case ErrorCode::kDegenerateLabels:
      return "DegenerateLabels";
    case ErrorCode::kDuplicateProduct:
      return "DuplicateProduct";
    case ErrorCode::kEmptyProductList:
      return "EmptyProductList";
    case ErrorCode::kFeedParseError:
      return "FeedParseError";
  }
  return "Unknown";
}

}  // namespace binsbom

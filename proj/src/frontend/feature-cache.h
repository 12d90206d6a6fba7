// frontend/feature-cache.h

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

#ifndef SPEECHMARK_FRONTEND_FEATURE_CACHE_H_
#define SPEECHMARK_FRONTEND_FEATURE_CACHE_H_

#include <string>

#include "frontend/mfcc.h"

namespace speechmark {

// On-disk per-recording feature file: header (T, F) as two little-endian
// 32-bit unsigned integers, then T*F little-endian 32-bit floats, row-major.
void WriteFeatureCache(const std::string &path, const FeatureMatrix &features);
FeatureMatrix ReadFeatureCache(const std::string &path);

}  // namespace speechmark

#endif  // SPEECHMARK_FRONTEND_FEATURE_CACHE_H_
